#include "varoc/kepler.hpp"

#include <cmath>
#include <numbers>

namespace varoc {

KeplerParams KeplerParams::defaults() {
  KeplerParams kp;
  kp.q_target = Vec(2);
  kp.q_target << -kp.r_outer, 0.0;
  kp.v_target = Vec(2);
  // Circular velocity at the outer radius, oriented with the transfer.
  kp.v_target << 0.0, -std::sqrt(kp.grav * kp.mass / kp.r_outer);
  kp.weight_q = Mat::Identity(2, 2);
  kp.weight_v = Mat::Identity(2, 2);
  return kp;
}

namespace {

double radius_checked(const Vec& q) {
  const double r = q.norm();
  if (!(r > 0.0)) throw SingularityError("kepler model evaluated at r = 0");
  return r;
}

}  // namespace

ControlSystem kepler_system(double grav, double mass) {
  require(grav > 0.0 && mass > 0.0, "kepler needs positive G and M");
  ControlSystem sys;
  sys.n = 2;
  sys.m = 1;
  const double gm = grav * mass;

  sys.f = [gm](const Vec& q, const Vec&) -> Vec {
    const double r = radius_checked(q);
    return -gm / (r * r * r) * q;
  };
  sys.df_dq = [gm](const Vec& q, const Vec&) -> Mat {
    const double r = radius_checked(q);
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    return -gm * (Mat::Identity(2, 2) / r3 - 3.0 / r5 * (q * q.transpose()));
  };
  sys.df_dv = [](const Vec&, const Vec&) -> Mat { return Mat::Zero(2, 2); };

  sys.rho = [](const Vec& q) -> Mat {
    const double r = radius_checked(q);
    Mat out(2, 1);
    out << -q(1) / r, q(0) / r;
    return out;
  };
  // d/dq of (-y, x)/r: columns are the partials in x and y.
  sys.drho_dq_action = [](const Vec& q, const Vec& u, const Vec& w) -> Vec {
    const double r = radius_checked(q);
    const double r3 = r * r * r;
    const double x = q(0), y = q(1);
    Mat dx(2, 1), dy(2, 1);
    dx << x * y / r3, y * y / r3;
    dy << -x * x / r3, -x * y / r3;
    return (w(0) * dx + w(1) * dy) * u(0);
  };

  sys.metric = [](const Vec&) -> Mat { return Mat::Identity(1, 1); };
  sys.dmetric_dq_action = [](const Vec&, const Vec&, const Vec&, const Vec&) {
    return 0.0;
  };
  sys.constant_metric_scalar = 1.0;
  return sys;
}

double transfer_horizon(double d_revs, double grav, double mass, double r_inner,
                        double r_outer) {
  require(grav > 0.0 && mass > 0.0 && r_inner > 0.0 && r_outer > 0.0,
          "transfer_horizon needs positive parameters");
  const double pi = std::numbers::pi;
  const double sum = r_inner + r_outer;
  return d_revs * std::sqrt(4.0 * pi * pi * sum * sum * sum / (8.0 * grav * mass));
}

std::pair<Vec, Vec> initial_circular_state(double grav, double mass, double x0) {
  require(x0 > 0.0, "initial x-position must be positive");
  Vec q0(2), v0(2);
  q0 << x0, 0.0;
  v0 << 0.0, std::sqrt(grav * mass / x0);
  return {q0, v0};
}

TerminalCost quadratic_terminal_cost(const Vec& q_target, const Vec& v_target,
                                     const Mat& weight_q, const Mat& weight_v) {
  TerminalCost tc;
  tc.phi = [=](const Vec& q, const Vec& v) {
    Vec dq = q - q_target;
    Vec dv = v - v_target;
    return dq.dot(weight_q * dq) + dv.dot(weight_v * dv);
  };
  tc.dphi_dq = [=](const Vec& q, const Vec&) -> Vec {
    return 2.0 * (weight_q * (q - q_target));
  };
  tc.dphi_dv = [=](const Vec&, const Vec& v) -> Vec {
    return 2.0 * (weight_v * (v - v_target));
  };
  return tc;
}

OCProblem make_kepler_problem(const KeplerParams& params, double horizon_override) {
  OCProblem prob;
  prob.system = kepler_system(params.grav, params.mass);
  prob.terminal = quadratic_terminal_cost(params.q_target, params.v_target,
                                          params.weight_q, params.weight_v);
  auto [q0, v0] = initial_circular_state(params.grav, params.mass, params.x0);
  prob.q0 = q0;
  prob.v0 = v0;
  prob.horizon = horizon_override > 0.0
                     ? horizon_override
                     : transfer_horizon(params.d_revs, params.grav, params.mass,
                                        params.r_inner, params.r_outer);
  prob.validate();
  return prob;
}

}  // namespace varoc
