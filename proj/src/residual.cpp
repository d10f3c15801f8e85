#include "varoc/residual.hpp"

#include <cmath>

namespace varoc {

BlockIndex ResidualVector::block(const std::string& name) const {
  for (const auto& [key, idx] : blocks)
    if (key == name) return idx;
  throw std::out_of_range("unknown residual block: " + name);
}

Eigen::VectorXd ResidualVector::segment(const std::string& name) const {
  BlockIndex idx = block(name);
  return values.segment(idx.offset, idx.length);
}

Eigen::Index unknown_count(Formulation form, int n, int m, int num_steps) {
  Eigen::Index count = 2 * static_cast<Eigen::Index>(n) * (num_steps + 1);
  if (form == Formulation::Dependent) count += 2 * static_cast<Eigen::Index>(m) * num_steps;
  return count;
}

Vec pack_trajectory(const DiscreteTrajectory& traj, Formulation form) {
  const int nodes = traj.node_count();
  require(nodes >= 3 && static_cast<int>(traj.lam.size()) == nodes,
          "trajectory must hold N+1 >= 3 nodes for q and lambda");
  const int n = static_cast<int>(traj.q[0].size());
  const int N = nodes - 1;
  const bool dep = form == Formulation::Dependent;
  const int m = dep ? static_cast<int>(traj.u1.at(0).size()) : 0;
  Vec x(unknown_count(form, n, m, N));
  Eigen::Index at = 0;
  for (const Vec& qk : traj.q) {
    x.segment(at, n) = qk;
    at += n;
  }
  for (const Vec& lk : traj.lam) {
    x.segment(at, n) = lk;
    at += n;
  }
  if (dep) {
    require(static_cast<int>(traj.u1.size()) == N && static_cast<int>(traj.u2.size()) == N,
            "dependent trajectory must hold N interval controls");
    for (const Vec& u : traj.u1) {
      x.segment(at, m) = u;
      at += m;
    }
    for (const Vec& u : traj.u2) {
      x.segment(at, m) = u;
      at += m;
    }
  }
  return x;
}

DiscreteTrajectory unpack_trajectory(const Vec& x, Formulation form, int n, int m,
                                     int num_steps) {
  require(x.size() == unknown_count(form, n, m, num_steps),
          "unknown vector has wrong length");
  DiscreteTrajectory traj;
  traj.q.resize(num_steps + 1);
  traj.lam.resize(num_steps + 1);
  Eigen::Index at = 0;
  for (int k = 0; k <= num_steps; ++k, at += n) traj.q[k] = x.segment(at, n);
  for (int k = 0; k <= num_steps; ++k, at += n) traj.lam[k] = x.segment(at, n);
  if (form == Formulation::Dependent) {
    traj.u1.resize(num_steps);
    traj.u2.resize(num_steps);
    for (int k = 0; k < num_steps; ++k, at += m) traj.u1[k] = x.segment(at, m);
    for (int k = 0; k < num_steps; ++k, at += m) traj.u2[k] = x.segment(at, m);
  }
  return traj;
}

namespace {

void check_trajectory(const OCProblem& prob, const SchemeParams& p,
                      const DiscreteTrajectory& traj, bool want_controls) {
  const int n = prob.system.n;
  const int N = p.num_steps;
  require(static_cast<int>(traj.q.size()) == N + 1 &&
              static_cast<int>(traj.lam.size()) == N + 1,
          "trajectory node count does not match the scheme");
  for (int k = 0; k <= N; ++k) {
    require(traj.q[k].size() == n && traj.lam[k].size() == n,
            "trajectory state dimension mismatch");
    if (!traj.q[k].allFinite() || !traj.lam[k].allFinite())
      throw std::invalid_argument("non-finite trajectory input");
  }
  if (want_controls) {
    const int m = prob.system.m;
    require(static_cast<int>(traj.u1.size()) == N &&
                static_cast<int>(traj.u2.size()) == N,
            "dependent trajectory must carry N interval controls");
    for (int k = 0; k < N; ++k) {
      require(traj.u1[k].size() == m && traj.u2[k].size() == m,
              "interval control dimension mismatch");
      if (!traj.u1[k].allFinite() || !traj.u2[k].allFinite())
        throw std::invalid_argument("non-finite control input");
    }
  } else {
    require(traj.u1.empty() && traj.u2.empty(),
            "independent trajectory must not carry control sequences");
  }
}

NodePair pair_at(const DiscreteTrajectory& traj, int k) {
  return NodePair{traj.q[k], traj.lam[k], traj.q[k + 1], traj.lam[k + 1]};
}

struct Builder {
  ResidualVector out;
  Eigen::Index at = 0;
  void start(Eigen::Index total) {
    out.values.resize(total);
    out.values.setZero();
  }
  Eigen::Index add_block(const std::string& name, Eigen::Index len) {
    out.blocks.push_back({name, {at, len}});
    Eigen::Index offset = at;
    at += len;
    return offset;
  }
};

// Both optimality systems share the same skeleton: interior rows are the
// momentum-matching defects of consecutive intervals scaled by -1/h, which is
// exactly the divided-difference form of the printed equations; boundary rows
// come from the first/last interval momenta and the terminal cost under
// hypothesis H2/H2'.
ResidualVector assemble_common(const OCProblem& prob, const SchemeParams& p,
                               const DiscreteTrajectory& traj,
                               const std::vector<IntervalMomenta>& im) {
  const int n = prob.system.n;
  const int N = p.num_steps;
  const double h = p.dt;
  const bool dep = traj.has_controls();
  const int m = prob.system.m;

  Builder b;
  Eigen::Index total = 2 * static_cast<Eigen::Index>(n) * (N + 1);
  if (dep) total += 2 * static_cast<Eigen::Index>(m) * N;
  b.start(total);

  Eigen::Index ofs_dl = b.add_block("del_lambda", static_cast<Eigen::Index>(n) * (N - 1));
  Eigen::Index ofs_dq = b.add_block("del_q", static_cast<Eigen::Index>(n) * (N - 1));
  Eigen::Index ofs_u1 = 0, ofs_u2 = 0;
  if (dep) {
    ofs_u1 = b.add_block("min_u1", static_cast<Eigen::Index>(m) * N);
    ofs_u2 = b.add_block("min_u2", static_cast<Eigen::Index>(m) * N);
  }
  Eigen::Index ofs_q0 = b.add_block("init_pos", n);
  Eigen::Index ofs_v0 = b.add_block("init_vel", n);
  Eigen::Index ofs_tq = b.add_block("terminal_q", n);
  Eigen::Index ofs_tl = b.add_block("terminal_lam", n);

  Vec& r = b.out.values;
  for (int k = 1; k <= N - 1; ++k) {
    r.segment(ofs_dl + (k - 1) * n, n) =
        -(im[k - 1].p_plus_lam - im[k].p_minus_lam) / h;
    r.segment(ofs_dq + (k - 1) * n, n) =
        -(im[k - 1].p_plus_q - im[k].p_minus_q) / h;
  }

  if (dep) {
    for (int k = 0; k < N; ++k) {
      Vec qb1 = averaged(p.gamma, traj.q[k], traj.q[k + 1]);
      Vec lb1 = averaged(p.gamma, traj.lam[k], traj.lam[k + 1]);
      Vec qb2 = averaged(1.0 - p.gamma, traj.q[k], traj.q[k + 1]);
      Vec lb2 = averaged(1.0 - p.gamma, traj.lam[k], traj.lam[k + 1]);
      Vec g_u1 = prob.system.metric_is_scalar()
                     ? Vec(*prob.system.constant_metric_scalar * traj.u1[k])
                     : Vec(prob.system.metric(qb1) * traj.u1[k]);
      Vec g_u2 = prob.system.metric_is_scalar()
                     ? Vec(*prob.system.constant_metric_scalar * traj.u2[k])
                     : Vec(prob.system.metric(qb2) * traj.u2[k]);
      r.segment(ofs_u1 + k * m, m) = prob.system.rho(qb1).transpose() * lb1 - g_u1;
      r.segment(ofs_u2 + k * m, m) = prob.system.rho(qb2).transpose() * lb2 - g_u2;
    }
  }

  const Vec& v0_minus = im[0].p_minus_lam;
  const Vec& vN_plus = im[N - 1].p_plus_lam;
  r.segment(ofs_q0, n) = traj.q[0] - prob.q0;
  r.segment(ofs_v0, n) = v0_minus - prob.v0;
  r.segment(ofs_tq, n) =
      prob.terminal.dphi_dq(traj.q[N], vN_plus) - im[N - 1].p_plus_q;
  r.segment(ofs_tl, n) = traj.lam[N] + prob.terminal.dphi_dv(traj.q[N], vN_plus);
  return b.out;
}

}  // namespace

ResidualVector assemble_indep(const OCProblem& prob, const SchemeParams& p,
                              const DiscreteTrajectory& traj) {
  check_trajectory(prob, p, traj, false);
  std::vector<IntervalMomenta> im(p.num_steps);
  for (int k = 0; k < p.num_steps; ++k)
    im[k] = interval_momenta_indep(prob.system, pair_at(traj, k), p);
  return assemble_common(prob, p, traj, im);
}

ResidualVector assemble_dep(const OCProblem& prob, const SchemeParams& p,
                            const DiscreteTrajectory& traj) {
  check_trajectory(prob, p, traj, true);
  std::vector<IntervalMomenta> im(p.num_steps);
  for (int k = 0; k < p.num_steps; ++k)
    im[k] = interval_momenta_dep(prob.system, pair_at(traj, k),
                                 IntervalControls{traj.u1[k], traj.u2[k]}, p);
  return assemble_common(prob, p, traj, im);
}

std::pair<Vec, Vec> recover_multipliers(const OCProblem& prob, const SchemeParams& p,
                                        const DiscreteTrajectory& traj) {
  NodePair first = pair_at(traj, 0);
  IntervalMomenta im =
      traj.has_controls()
          ? interval_momenta_dep(prob.system, first,
                                 IntervalControls{traj.u1[0], traj.u2[0]}, p)
          : interval_momenta_indep(prob.system, first, p);
  Vec mu = -im.p_minus_q;
  Vec nu = traj.lam[0];
  return {mu, nu};
}

namespace {

double objective_common(const OCProblem& prob, const SchemeParams& p,
                        const DiscreteTrajectory& traj, double action,
                        const Vec& v0_minus, const Vec& vN_plus) {
  const int N = p.num_steps;
  Vec mu = traj.mu, nu = traj.nu;
  if (mu.size() == 0 || nu.size() == 0) {
    auto rec = recover_multipliers(prob, p, traj);
    mu = rec.first;
    nu = rec.second;
  }
  return prob.terminal.phi(traj.q[N], vN_plus) + mu.dot(traj.q[0] - prob.q0) +
         nu.dot(v0_minus - prob.v0) + traj.lam[N].dot(vN_plus) -
         traj.lam[0].dot(v0_minus) - action;
}

}  // namespace

double augmented_objective_indep(const OCProblem& prob, const SchemeParams& p,
                                 const DiscreteTrajectory& traj) {
  check_trajectory(prob, p, traj, false);
  double action = 0.0;
  for (int k = 0; k < p.num_steps; ++k)
    action += lagrangian_indep(prob.system, pair_at(traj, k), p);
  auto [v0, vN] = boundary_velocities_indep(prob.system, pair_at(traj, 0),
                                            pair_at(traj, p.num_steps - 1), p);
  return objective_common(prob, p, traj, action, v0, vN);
}

double augmented_objective_dep(const OCProblem& prob, const SchemeParams& p,
                               const DiscreteTrajectory& traj) {
  check_trajectory(prob, p, traj, true);
  double action = 0.0;
  for (int k = 0; k < p.num_steps; ++k)
    action += lagrangian_dep(prob.system, pair_at(traj, k),
                             IntervalControls{traj.u1[k], traj.u2[k]}, p);
  const int N = p.num_steps;
  auto [v0, vN] = boundary_velocities_dep(
      prob.system, pair_at(traj, 0), IntervalControls{traj.u1[0], traj.u2[0]},
      pair_at(traj, N - 1), IntervalControls{traj.u1[N - 1], traj.u2[N - 1]}, p);
  return objective_common(prob, p, traj, action, v0, vN);
}

SparsityPattern sparsity_pattern(Formulation form, int n, int m, int num_steps) {
  const int N = num_steps;
  SparsityPattern pat;
  pat.num_nodes = N + 1;

  pat.slots_per_node = 2 * n + (form == Formulation::Dependent ? 2 * m : 0);
  pat.col_node.reserve(unknown_count(form, n, m, N));
  pat.col_slot.reserve(unknown_count(form, n, m, N));
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j < n; ++j) {
      pat.col_node.push_back(k);
      pat.col_slot.push_back(j);
    }
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j < n; ++j) {
      pat.col_node.push_back(k);
      pat.col_slot.push_back(n + j);
    }
  if (form == Formulation::Dependent) {
    for (int rep = 0; rep < 2; ++rep)
      for (int k = 0; k < N; ++k)
        for (int j = 0; j < m; ++j) {
          pat.col_node.push_back(k);
          pat.col_slot.push_back(2 * n + rep * m + j);
        }
  }

  for (int k = 1; k <= N - 1; ++k)
    for (int j = 0; j < n; ++j) pat.row_node.push_back(k);  // del_lambda
  for (int k = 1; k <= N - 1; ++k)
    for (int j = 0; j < n; ++j) pat.row_node.push_back(k);  // del_q
  if (form == Formulation::Dependent) {
    for (int rep = 0; rep < 2; ++rep)
      for (int k = 0; k < N; ++k)
        for (int j = 0; j < m; ++j) pat.row_node.push_back(k);  // min blocks
  }
  for (int j = 0; j < 2 * n; ++j) pat.row_node.push_back(0);  // init_pos, init_vel
  for (int j = 0; j < 2 * n; ++j) pat.row_node.push_back(N);  // terminal rows
  return pat;
}

}  // namespace varoc
