#include "varoc/scheme.hpp"

#include <cmath>

namespace varoc {

void SchemeParams::validate(double horizon) const {
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
  require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0,1]");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0,1]");
  require(num_steps >= 2, "need at least two steps");
  require(dt > 0.0, "time step must be positive");
  require(std::abs(num_steps * dt - horizon) <= 1e-12 * std::max(1.0, horizon),
          "N*h must equal the horizon");
}

SchemeParams make_scheme(double alpha, double beta, double gamma, int num_steps,
                         double horizon) {
  SchemeParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.num_steps = num_steps;
  p.dt = horizon / num_steps;
  p.validate(horizon);
  return p;
}

double lagrangian_continuous(const ControlSystem& sys, const Vec& q, const Vec& lam,
                             const Vec& v, const Vec& vlam) {
  Vec ustar = minimising_control(sys, q, lam);
  // lam^T b lam == lam^T rho u*
  return vlam.dot(v) + lam.dot(sys.f(q, v)) + 0.5 * lam.dot(sys.rho(q) * ustar);
}

double lagrangian_continuous_dep(const ControlSystem& sys, const Vec& q,
                                 const Vec& lam, const Vec& v, const Vec& vlam,
                                 const Vec& u) {
  double quad = sys.metric_is_scalar() ? (*sys.constant_metric_scalar) * u.squaredNorm()
                                       : u.dot(sys.metric(q) * u);
  return vlam.dot(v) + lam.dot(sys.f(q, v) + sys.rho(q) * u) - 0.5 * quad;
}

namespace {

// Everything the optimality conditions need from one interval at one
// averaging weight w. The control-independent case is the control-dependent
// one evaluated at the minimising control of the averaged point, so a single
// evaluation path serves both formulations.
struct WeightTerms {
  Vec qbar, lambar;
  Vec u;          // given interval control, or minimising control at (qbar, lambar)
  Vec rho_u;      // rho(qbar) u
  Vec accel;      // f(qbar, dq) + rho(qbar) u
  double f_dot_lam = 0.0;    // lambar . f
  double rho_u_dot_lam = 0.0;
  double u_g_u = 0.0;        // u^T g(qbar) u
  Mat dfq_t, dfv_t;          // transposed drift Jacobians at (qbar, dq)
  Vec force_grad;            // grad_q[lambar . rho u - (1/2) u^T g u], u fixed
};

WeightTerms weight_terms(const ControlSystem& sys, const NodePair& pair, double w,
                         const Vec& dq, const Vec* given_u, bool need_derivs) {
  WeightTerms t;
  t.qbar = averaged(w, pair.q0, pair.q1);
  t.lambar = averaged(w, pair.lam0, pair.lam1);
  t.u = given_u ? *given_u : minimising_control(sys, t.qbar, t.lambar);
  Mat r = sys.rho(t.qbar);
  t.rho_u = r * t.u;
  Vec fval = sys.f(t.qbar, dq);
  t.accel = fval + t.rho_u;
  t.f_dot_lam = t.lambar.dot(fval);
  t.rho_u_dot_lam = t.lambar.dot(t.rho_u);
  if (sys.metric_is_scalar())
    t.u_g_u = (*sys.constant_metric_scalar) * t.u.squaredNorm();
  else
    t.u_g_u = t.u.dot(sys.metric(t.qbar) * t.u);
  if (need_derivs) {
    t.dfq_t = sys.df_dq(t.qbar, dq).transpose();
    t.dfv_t = sys.df_dv(t.qbar, dq).transpose();
    t.force_grad = grad_lam_rho_u(sys, t.qbar, t.lambar, t.u) -
                   0.5 * grad_u_metric_u(sys, t.qbar, t.u);
  }
  return t;
}

}  // namespace

double lagrangian_indep(const ControlSystem& sys, const NodePair& pair,
                        const SchemeParams& p) {
  const double h = p.dt;
  Vec dq = divided_diff(pair.q0, pair.q1, h);
  Vec dlam = divided_diff(pair.lam0, pair.lam1, h);
  const double kinetic = dlam.dot(dq);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, nullptr, false);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, nullptr, false);
  // lam^T b lam enters with weight 1/2; it equals lam . rho u*.
  double la = kinetic + a.f_dot_lam + 0.5 * a.rho_u_dot_lam;
  double lb = kinetic + b.f_dot_lam + 0.5 * b.rho_u_dot_lam;
  return h * (p.alpha * la + (1.0 - p.alpha) * lb);
}

double lagrangian_dep(const ControlSystem& sys, const NodePair& pair,
                      const IntervalControls& u, const SchemeParams& p) {
  const double h = p.dt;
  Vec dq = divided_diff(pair.q0, pair.q1, h);
  Vec dlam = divided_diff(pair.lam0, pair.lam1, h);
  const double kinetic = dlam.dot(dq);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, &u.u1, false);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, &u.u2, false);
  double la = kinetic + a.f_dot_lam + a.rho_u_dot_lam - 0.5 * a.u_g_u;
  double lb = kinetic + b.f_dot_lam + b.rho_u_dot_lam - 0.5 * b.u_g_u;
  return h * (p.alpha * la + (1.0 - p.alpha) * lb);
}

namespace {

Vec velocity_minus(const SchemeParams& p, const Vec& dq, const Vec& accel_a,
                   const Vec& accel_b) {
  return dq - p.dt * (p.alpha * p.gamma * accel_a +
                      (1.0 - p.alpha) * (1.0 - p.gamma) * accel_b);
}

Vec velocity_plus(const SchemeParams& p, const Vec& dq, const Vec& accel_a,
                  const Vec& accel_b) {
  return dq + p.dt * (p.alpha * (1.0 - p.gamma) * accel_a +
                      (1.0 - p.alpha) * p.gamma * accel_b);
}

// Assembles the four endpoint derivatives of h [alpha L^gamma + (1-alpha)
// L^(1-gamma)] from the two weight evaluations. For averaging weight w the
// chain factors are w at y_k and (1-w) at y_{k+1}; divided differences
// contribute -1/h and +1/h.
IntervalMomenta assemble_momenta(const NodePair& pair, const SchemeParams& p,
                                 const WeightTerms& a, const WeightTerms& b) {
  const double h = p.dt;
  Vec dq = divided_diff(pair.q0, pair.q1, h);
  Vec dlam = divided_diff(pair.lam0, pair.lam1, h);
  const double wa = p.alpha, wb = 1.0 - p.alpha;
  const double ga = p.gamma, gb = 1.0 - p.gamma;

  // d/dq_k and d/dq_{k+1} of the discrete Lagrangian
  Vec dLq_a = a.dfq_t * a.lambar + a.force_grad;
  Vec dLq_b = b.dfq_t * b.lambar + b.force_grad;
  Vec dq_k = -dlam + wa * (h * ga * dLq_a - a.dfv_t * a.lambar) +
             wb * (h * gb * dLq_b - b.dfv_t * b.lambar);
  Vec dq_k1 = dlam + wa * (h * (1.0 - ga) * dLq_a + a.dfv_t * a.lambar) +
              wb * (h * (1.0 - gb) * dLq_b + b.dfv_t * b.lambar);

  IntervalMomenta m;
  m.p_minus_q = -dq_k;
  m.p_plus_q = dq_k1;
  // lambda-slots are the interval velocities
  m.p_minus_lam = velocity_minus(p, dq, a.accel, b.accel);
  m.p_plus_lam = velocity_plus(p, dq, a.accel, b.accel);
  return m;
}

}  // namespace

IntervalMomenta interval_momenta_indep(const ControlSystem& sys, const NodePair& pair,
                                       const SchemeParams& p) {
  Vec dq = divided_diff(pair.q0, pair.q1, p.dt);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, nullptr, true);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, nullptr, true);
  return assemble_momenta(pair, p, a, b);
}

IntervalMomenta interval_momenta_dep(const ControlSystem& sys, const NodePair& pair,
                                     const IntervalControls& u, const SchemeParams& p) {
  Vec dq = divided_diff(pair.q0, pair.q1, p.dt);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, &u.u1, true);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, &u.u2, true);
  return assemble_momenta(pair, p, a, b);
}

namespace {

std::pair<Vec, Vec> stack_momenta(const IntervalMomenta& m) {
  Vec pm(m.p_minus_q.size() + m.p_minus_lam.size());
  pm << m.p_minus_q, m.p_minus_lam;
  Vec pp(m.p_plus_q.size() + m.p_plus_lam.size());
  pp << m.p_plus_q, m.p_plus_lam;
  return {pm, pp};
}

}  // namespace

std::pair<Vec, Vec> discrete_momenta_indep(const ControlSystem& sys,
                                           const NodePair& pair,
                                           const SchemeParams& p) {
  return stack_momenta(interval_momenta_indep(sys, pair, p));
}

std::pair<Vec, Vec> discrete_momenta_dep(const ControlSystem& sys,
                                         const NodePair& pair,
                                         const IntervalControls& u,
                                         const SchemeParams& p) {
  return stack_momenta(interval_momenta_dep(sys, pair, u, p));
}

Vec interval_velocity_minus_indep(const ControlSystem& sys, const NodePair& pair,
                                  const SchemeParams& p) {
  Vec dq = divided_diff(pair.q0, pair.q1, p.dt);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, nullptr, false);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, nullptr, false);
  return velocity_minus(p, dq, a.accel, b.accel);
}

Vec interval_velocity_plus_indep(const ControlSystem& sys, const NodePair& pair,
                                 const SchemeParams& p) {
  Vec dq = divided_diff(pair.q0, pair.q1, p.dt);
  WeightTerms a = weight_terms(sys, pair, p.gamma, dq, nullptr, false);
  WeightTerms b = weight_terms(sys, pair, 1.0 - p.gamma, dq, nullptr, false);
  return velocity_plus(p, dq, a.accel, b.accel);
}

namespace {

// Control-dependent accelerations never touch a costate. Materialisation
// order matches weight_terms so momenta lambda-slots stay bit-identical.
Vec accel_dep(const ControlSystem& sys, const Vec& qbar, const Vec& dq, const Vec& u) {
  Vec rho_u = sys.rho(qbar) * u;
  Vec fval = sys.f(qbar, dq);
  return fval + rho_u;
}

}  // namespace

Vec interval_velocity_minus_dep(const ControlSystem& sys, const Vec& qa, const Vec& qb,
                                const IntervalControls& u, const SchemeParams& p) {
  Vec dq = divided_diff(qa, qb, p.dt);
  Vec aa = accel_dep(sys, averaged(p.gamma, qa, qb), dq, u.u1);
  Vec ab = accel_dep(sys, averaged(1.0 - p.gamma, qa, qb), dq, u.u2);
  return velocity_minus(p, dq, aa, ab);
}

Vec interval_velocity_plus_dep(const ControlSystem& sys, const Vec& qa, const Vec& qb,
                               const IntervalControls& u, const SchemeParams& p) {
  Vec dq = divided_diff(qa, qb, p.dt);
  Vec aa = accel_dep(sys, averaged(p.gamma, qa, qb), dq, u.u1);
  Vec ab = accel_dep(sys, averaged(1.0 - p.gamma, qa, qb), dq, u.u2);
  return velocity_plus(p, dq, aa, ab);
}

std::pair<Vec, Vec> boundary_velocities_indep(const ControlSystem& sys,
                                              const NodePair& first,
                                              const NodePair& last,
                                              const SchemeParams& p) {
  return {interval_velocity_minus_indep(sys, first, p),
          interval_velocity_plus_indep(sys, last, p)};
}

std::pair<Vec, Vec> boundary_velocities_dep(const ControlSystem& sys,
                                            const NodePair& first,
                                            const IntervalControls& u_first,
                                            const NodePair& last,
                                            const IntervalControls& u_last,
                                            const SchemeParams& p) {
  return {interval_velocity_minus_dep(sys, first.q0, first.q1, u_first, p),
          interval_velocity_plus_dep(sys, last.q0, last.q1, u_last, p)};
}

}  // namespace varoc
