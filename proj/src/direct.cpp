#include "varoc/direct.hpp"

#include <cmath>

namespace varoc {

namespace {

Vec require_multiplier(const Vec& stored, const Vec& recovered) {
  return stored.size() > 0 ? stored : recovered;
}

// Local evaluation helpers for the transcription objectives. These read only
// the model maps f, rho, g; all stationarity derivatives come from
// differencing the scalar objectives.
struct IntervalEval {
  Vec fa, fb;      // f at the two averaged points
  Vec ra_u, rb_u;  // rho * U at the two averaged points
  double cost = 0.0;
};

IntervalEval eval_interval(const ControlSystem& sys, const SchemeParams& p,
                           const Vec& qa, const Vec& qb, const Vec& u1, const Vec& u2) {
  IntervalEval e;
  Vec dq = (qb - qa) / p.dt;
  Vec qbar1 = p.gamma * qa + (1.0 - p.gamma) * qb;
  Vec qbar2 = (1.0 - p.gamma) * qa + p.gamma * qb;
  e.fa = sys.f(qbar1, dq);
  e.fb = sys.f(qbar2, dq);
  e.ra_u = sys.rho(qbar1) * u1;
  e.rb_u = sys.rho(qbar2) * u2;
  double g1, g2;
  if (sys.metric_is_scalar()) {
    g1 = *sys.constant_metric_scalar * u1.squaredNorm();
    g2 = *sys.constant_metric_scalar * u2.squaredNorm();
  } else {
    g1 = u1.dot(sys.metric(qbar1) * u1);
    g2 = u2.dot(sys.metric(qbar2) * u2);
  }
  e.cost = 0.5 * p.dt * (p.alpha * g1 + (1.0 - p.alpha) * g2);
  return e;
}

// Discretised boundary velocities in their control-dependent form.
Vec v0_minus_of(const ControlSystem& sys, const SchemeParams& p, const Vec& q0,
                const Vec& q1, const Vec& u1, const Vec& u2) {
  IntervalEval e = eval_interval(sys, p, q0, q1, u1, u2);
  return (q1 - q0) / p.dt - p.dt * p.alpha * p.gamma * (e.fa + e.ra_u) -
         p.dt * (1.0 - p.alpha) * (1.0 - p.gamma) * (e.fb + e.rb_u);
}

Vec vN_plus_of(const ControlSystem& sys, const SchemeParams& p, const Vec& qa,
               const Vec& qb, const Vec& u1, const Vec& u2) {
  IntervalEval e = eval_interval(sys, p, qa, qb, u1, u2);
  return (qb - qa) / p.dt + p.dt * p.alpha * (1.0 - p.gamma) * (e.fa + e.ra_u) +
         p.dt * (1.0 - p.alpha) * p.gamma * (e.fb + e.rb_u);
}

// Right-hand side of the discretised SODE contributed by interval k to node k
// (weight_left) and node k+1 (weight_right).
struct SodeWeights {
  double left_a, left_b, right_a, right_b;
};

SodeWeights sode_weights(const SchemeParams& p) {
  return {p.alpha * p.gamma, (1.0 - p.alpha) * (1.0 - p.gamma),
          p.alpha * (1.0 - p.gamma), (1.0 - p.alpha) * p.gamma};
}

}  // namespace

Dir1Variables map_new_to_dir1(const DiscreteTrajectory& traj, const OCProblem& prob,
                              const SchemeParams& p) {
  require(traj.has_controls(), "dir1 mapping needs a dependent trajectory");
  const int N = p.num_steps;
  Dir1Variables vars;
  vars.q = traj.q;
  vars.u1 = traj.u1;
  vars.u2 = traj.u2;
  vars.lam_v.resize(N);
  vars.lam_q.resize(N);
  for (int k = 0; k < N; ++k) {
    vars.lam_v[k] = traj.lam[k + 1];
    vars.lam_q[k] = (traj.lam[k] - traj.lam[k + 1]) / p.dt;
  }
  vars.v.resize(N + 1);
  for (int k = 0; k < N; ++k)
    vars.v[k] = interval_velocity_minus_dep(prob.system, traj.q[k], traj.q[k + 1],
                                            IntervalControls{traj.u1[k], traj.u2[k]}, p);
  vars.v[N] = interval_velocity_plus_dep(prob.system, traj.q[N - 1], traj.q[N],
                                         IntervalControls{traj.u1[N - 1], traj.u2[N - 1]}, p);
  auto [mu, nu] = recover_multipliers(prob, p, traj);
  vars.mu = require_multiplier(traj.mu, mu);
  vars.nu = require_multiplier(traj.nu, nu);
  return vars;
}

Dir2Variables map_new_to_dir2(const DiscreteTrajectory& traj, const OCProblem& prob,
                              const SchemeParams& p) {
  require(traj.has_controls(), "dir2 mapping needs a dependent trajectory");
  const int N = p.num_steps;
  Dir2Variables vars;
  vars.q = traj.q;
  vars.u1 = traj.u1;
  vars.u2 = traj.u2;
  vars.Lambda.assign(traj.lam.begin() + 1, traj.lam.begin() + N);
  auto [mu, nu] = recover_multipliers(prob, p, traj);
  vars.mu = require_multiplier(traj.mu, mu);
  vars.nu = require_multiplier(traj.nu, nu);
  return vars;
}

double dir1_objective(const Dir1Variables& vars, const OCProblem& prob,
                      const SchemeParams& p) {
  const ControlSystem& sys = prob.system;
  const int N = p.num_steps;
  const double h = p.dt;
  double total = prob.terminal.phi(vars.q[N], vars.v[N]);
  total += vars.mu.dot(vars.q[0] - prob.q0);
  total += vars.nu.dot(vars.v[0] - prob.v0);
  for (int k = 0; k < N; ++k) {
    IntervalEval e = eval_interval(sys, p, vars.q[k], vars.q[k + 1], vars.u1[k],
                                   vars.u2[k]);
    total += e.cost;
    Vec accel = p.alpha * (e.fa + e.ra_u) + (1.0 - p.alpha) * (e.fb + e.rb_u);
    Vec pos_eq = (vars.q[k + 1] - vars.q[k]) / h - vars.v[k] -
                 h * p.alpha * p.gamma * (e.fa + e.ra_u) -
                 h * (1.0 - p.alpha) * (1.0 - p.gamma) * (e.fb + e.rb_u);
    Vec vel_eq = (vars.v[k + 1] - vars.v[k]) / h - accel;
    total += h * vars.lam_q[k].dot(pos_eq) + h * vars.lam_v[k].dot(vel_eq);
  }
  return total;
}

double dir2_objective(const Dir2Variables& vars, const OCProblem& prob,
                      const SchemeParams& p) {
  const ControlSystem& sys = prob.system;
  const int N = p.num_steps;
  const double h = p.dt;
  const SodeWeights w = sode_weights(p);

  std::vector<IntervalEval> evals(N);
  double total = 0.0;
  for (int k = 0; k < N; ++k) {
    evals[k] = eval_interval(sys, p, vars.q[k], vars.q[k + 1], vars.u1[k], vars.u2[k]);
    total += evals[k].cost;
  }
  Vec v0 = v0_minus_of(sys, p, vars.q[0], vars.q[1], vars.u1[0], vars.u2[0]);
  Vec vN = vN_plus_of(sys, p, vars.q[N - 1], vars.q[N], vars.u1[N - 1], vars.u2[N - 1]);
  total += prob.terminal.phi(vars.q[N], vN);
  total += vars.mu.dot(vars.q[0] - prob.q0) + vars.nu.dot(v0 - prob.v0);
  for (int k = 1; k <= N - 1; ++k) {
    Vec sode = (vars.q[k + 1] - 2.0 * vars.q[k] + vars.q[k - 1]) / (h * h) -
               w.left_a * (evals[k].fa + evals[k].ra_u) -
               w.left_b * (evals[k].fb + evals[k].rb_u) -
               w.right_a * (evals[k - 1].fa + evals[k - 1].ra_u) -
               w.right_b * (evals[k - 1].fb + evals[k - 1].rb_u);
    total += h * vars.Lambda[k - 1].dot(sode);
  }
  return total;
}

namespace {

// Central difference of a scalar objective in one coordinate of a mutable
// variable reference.
template <typename Objective>
double stationarity_fd(Objective&& J, double& coord, double fd_step) {
  const double saved = coord;
  const double step = fd_step * (1.0 + std::abs(saved));
  coord = saved + step;
  const double jp = J();
  coord = saved - step;
  const double jm = J();
  coord = saved;
  return (jp - jm) / (2.0 * step);
}

struct Builder {
  ResidualVector out;
  Eigen::Index at = 0;
  Eigen::Index add(const std::string& name, Eigen::Index len) {
    out.blocks.push_back({name, {at, len}});
    Eigen::Index ofs = at;
    at += len;
    return ofs;
  }
};

}  // namespace

ResidualVector kkt_residual_dir1(const Dir1Variables& vars, const OCProblem& prob,
                                 const SchemeParams& p, double fd_step) {
  const int n = prob.system.n;
  const int m = prob.system.m;
  const int N = p.num_steps;

  Builder b;
  Eigen::Index ofs_sq = b.add("stat_q", static_cast<Eigen::Index>(n) * (N + 1));
  Eigen::Index ofs_sv = b.add("stat_v", static_cast<Eigen::Index>(n) * (N + 1));
  Eigen::Index ofs_u1 = b.add("stat_u1", static_cast<Eigen::Index>(m) * N);
  Eigen::Index ofs_u2 = b.add("stat_u2", static_cast<Eigen::Index>(m) * N);
  Eigen::Index ofs_cv = b.add("con_vdot", static_cast<Eigen::Index>(n) * N);
  Eigen::Index ofs_cq = b.add("con_qdot", static_cast<Eigen::Index>(n) * N);
  Eigen::Index ofs_q0 = b.add("con_q0", n);
  Eigen::Index ofs_v0 = b.add("con_v0", n);
  b.out.values.setZero(b.at);
  Vec& r = b.out.values;

  Dir1Variables work = vars;
  auto J = [&]() { return dir1_objective(work, prob, p); };
  for (int k = 0; k <= N; ++k)
    for (int i = 0; i < n; ++i) {
      r(ofs_sq + k * n + i) = stationarity_fd(J, work.q[k](i), fd_step);
      r(ofs_sv + k * n + i) = stationarity_fd(J, work.v[k](i), fd_step);
    }
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < m; ++i) {
      r(ofs_u1 + k * m + i) = stationarity_fd(J, work.u1[k](i), fd_step);
      r(ofs_u2 + k * m + i) = stationarity_fd(J, work.u2[k](i), fd_step);
    }

  for (int k = 0; k < N; ++k) {
    IntervalEval e = eval_interval(prob.system, p, vars.q[k], vars.q[k + 1],
                                   vars.u1[k], vars.u2[k]);
    Vec accel = p.alpha * (e.fa + e.ra_u) + (1.0 - p.alpha) * (e.fb + e.rb_u);
    r.segment(ofs_cv + k * n, n) = (vars.v[k + 1] - vars.v[k]) / p.dt - accel;
    r.segment(ofs_cq + k * n, n) =
        (vars.q[k + 1] - vars.q[k]) / p.dt - vars.v[k] -
        p.dt * p.alpha * p.gamma * (e.fa + e.ra_u) -
        p.dt * (1.0 - p.alpha) * (1.0 - p.gamma) * (e.fb + e.rb_u);
  }
  r.segment(ofs_q0, n) = vars.q[0] - prob.q0;
  r.segment(ofs_v0, n) = vars.v[0] - prob.v0;
  return b.out;
}

ResidualVector kkt_residual_dir2(const Dir2Variables& vars, const OCProblem& prob,
                                 const SchemeParams& p, double fd_step) {
  const int n = prob.system.n;
  const int m = prob.system.m;
  const int N = p.num_steps;
  const SodeWeights w = sode_weights(p);

  Builder b;
  Eigen::Index ofs_sq = b.add("stat_q", static_cast<Eigen::Index>(n) * (N + 1));
  Eigen::Index ofs_u1 = b.add("stat_u1", static_cast<Eigen::Index>(m) * N);
  Eigen::Index ofs_u2 = b.add("stat_u2", static_cast<Eigen::Index>(m) * N);
  Eigen::Index ofs_cs = b.add("con_sode", static_cast<Eigen::Index>(n) * (N - 1));
  Eigen::Index ofs_q0 = b.add("con_q0", n);
  Eigen::Index ofs_v0 = b.add("con_v0", n);
  b.out.values.setZero(b.at);
  Vec& r = b.out.values;

  Dir2Variables work = vars;
  auto J = [&]() { return dir2_objective(work, prob, p); };
  for (int k = 0; k <= N; ++k)
    for (int i = 0; i < n; ++i)
      r(ofs_sq + k * n + i) = stationarity_fd(J, work.q[k](i), fd_step);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < m; ++i) {
      r(ofs_u1 + k * m + i) = stationarity_fd(J, work.u1[k](i), fd_step);
      r(ofs_u2 + k * m + i) = stationarity_fd(J, work.u2[k](i), fd_step);
    }

  std::vector<IntervalEval> evals(N);
  for (int k = 0; k < N; ++k)
    evals[k] = eval_interval(prob.system, p, vars.q[k], vars.q[k + 1], vars.u1[k],
                             vars.u2[k]);
  for (int k = 1; k <= N - 1; ++k) {
    r.segment(ofs_cs + (k - 1) * n, n) =
        (vars.q[k + 1] - 2.0 * vars.q[k] + vars.q[k - 1]) / (p.dt * p.dt) -
        w.left_a * (evals[k].fa + evals[k].ra_u) -
        w.left_b * (evals[k].fb + evals[k].rb_u) -
        w.right_a * (evals[k - 1].fa + evals[k - 1].ra_u) -
        w.right_b * (evals[k - 1].fb + evals[k - 1].rb_u);
  }
  r.segment(ofs_q0, n) = vars.q[0] - prob.q0;
  r.segment(ofs_v0, n) =
      v0_minus_of(prob.system, p, vars.q[0], vars.q[1], vars.u1[0], vars.u2[0]) -
      prob.v0;
  return b.out;
}

}  // namespace varoc
