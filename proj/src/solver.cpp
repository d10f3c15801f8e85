#include "varoc/solver.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>

namespace varoc {

Mat fd_jacobian(const ResidualFn& F, const Vec& x, double fd_step) {
  Vec f0 = F(x);
  if (!f0.allFinite())
    throw std::runtime_error("residual not finite at Jacobian base point");
  Mat J(f0.size(), x.size());
  Vec xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = fd_step * (1.0 + std::abs(x(j)));
    xp(j) = x(j) + step;
    Vec fj = F(xp);
    if (!fj.allFinite())
      throw std::runtime_error("residual not finite during FD Jacobian");
    J.col(j) = (fj - f0) / step;
    xp(j) = x(j);
  }
  return J;
}

Eigen::SparseMatrix<double> fd_jacobian_structured(const ResidualFn& F, const Vec& x,
                                                   double fd_step,
                                                   const SparsityPattern& pattern) {
  Vec f0 = F(x);
  if (!f0.allFinite())
    throw std::runtime_error("residual not finite at Jacobian base point");
  require(static_cast<Eigen::Index>(pattern.col_node.size()) == x.size() &&
              static_cast<Eigen::Index>(pattern.row_node.size()) == f0.size(),
          "sparsity pattern does not match the system");

  std::vector<std::vector<int>> node_rows(pattern.num_nodes);
  for (int r = 0; r < static_cast<int>(pattern.row_node.size()); ++r)
    node_rows[pattern.row_node[r]].push_back(r);
  std::vector<std::vector<int>> node_cols(pattern.num_nodes);
  for (int c = 0; c < static_cast<int>(pattern.col_node.size()); ++c)
    node_cols[pattern.col_node[c]].push_back(c);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(pattern.row_node.size() * 8);
  Vec xp = x;
  // Columns of nodes three apart never touch a common row, so one slot of
  // every third node can be differenced in a single evaluation.
  for (int colour = 0; colour < 3; ++colour) {
    for (int slot = 0; slot < pattern.slots_per_node; ++slot) {
      std::vector<int> cols;
      for (int node = colour; node < pattern.num_nodes; node += 3)
        for (int c : node_cols[node])
          if (pattern.col_slot[c] == slot) cols.push_back(c);
      if (cols.empty()) continue;
      std::vector<double> steps(cols.size());
      for (size_t i = 0; i < cols.size(); ++i) {
        steps[i] = fd_step * (1.0 + std::abs(x(cols[i])));
        xp(cols[i]) = x(cols[i]) + steps[i];
      }
      Vec fp = F(xp);
      if (!fp.allFinite())
        throw std::runtime_error("residual not finite during FD Jacobian");
      for (size_t i = 0; i < cols.size(); ++i) {
        const int c = cols[i];
        const int node = pattern.col_node[c];
        for (int t = std::max(0, node - 1); t <= std::min(pattern.num_nodes - 1, node + 1); ++t)
          for (int r : node_rows[t])
            entries.emplace_back(r, c, (fp(r) - f0(r)) / steps[i]);
        xp(c) = x(c);
      }
    }
  }
  Eigen::SparseMatrix<double> J(f0.size(), x.size());
  J.setFromTriplets(entries.begin(), entries.end());
  return J;
}

namespace {

// Shared damped-Newton loop; the policy supplies the linearisation and solve.
template <typename StepPolicy>
std::pair<Vec, SolveStats> newton_loop(const ResidualFn& F, const Vec& x0,
                                       const SolverConfig& cfg, StepPolicy&& step) {
  SolveStats stats;
  Vec x = x0;
  Vec fx = F(x);
  require(fx.size() == x.size(), "newton_solve needs a square system");
  if (!fx.allFinite()) {
    stats.message = "residual not finite at the initial guess";
    stats.residual_norm = std::numeric_limits<double>::quiet_NaN();
    return {x, stats};
  }
  stats.residual_norm = fx.cwiseAbs().maxCoeff();
  stats.residual_history.push_back(stats.residual_norm);

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if (stats.residual_norm <= cfg.tol) {
      stats.converged = true;
      return {x, stats};
    }
    Vec dx;
    if (!step(F, x, fx, dx, stats)) return {x, stats};

    const double f2 = fx.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    while (t >= cfg.min_step) {
      Vec xt = x + t * dx;
      Vec ft = F(xt);
      if (ft.allFinite() && ft.squaredNorm() <= (1.0 - 1e-4 * t) * f2) {
        x = std::move(xt);
        fx = std::move(ft);
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      stats.message = "line search stalled";
      return {x, stats};
    }
    stats.iterations = iter + 1;
    stats.step_sizes.push_back(t);
    stats.residual_norm = fx.cwiseAbs().maxCoeff();
    stats.residual_history.push_back(stats.residual_norm);
    if (cfg.verbose)
      std::fprintf(stderr, "newton iter %3d  |F| = %.3e  step = %.3g\n",
                   stats.iterations, stats.residual_norm, t);
  }
  stats.converged = stats.residual_norm <= cfg.tol;
  if (!stats.converged) stats.message = "max_iter exceeded";
  return {x, stats};
}

}  // namespace

std::pair<Vec, SolveStats> newton_solve(const ResidualFn& F, const Vec& x0,
                                        const SolverConfig& cfg) {
  auto dense_step = [&cfg](const ResidualFn& F_, const Vec& x, const Vec& fx, Vec& dx,
                           SolveStats& stats) {
    Mat J;
    try {
      J = fd_jacobian(F_, x, cfg.fd_step);
    } catch (const std::runtime_error& e) {
      stats.message = e.what();
      return false;
    }
    Eigen::PartialPivLU<Mat> lu(J);
    stats.condition_estimate = lu.rcond();
    dx = lu.solve(-fx);
    if (!dx.allFinite() || stats.condition_estimate < 1e-15) {
      stats.message = "singular Jacobian (rcond = " +
                      std::to_string(stats.condition_estimate) + ")";
      return false;
    }
    return true;
  };
  return newton_loop(F, x0, cfg, dense_step);
}

std::pair<Vec, SolveStats> newton_solve(const ResidualFn& F, const Vec& x0,
                                        const SolverConfig& cfg,
                                        const SparsityPattern& pattern) {
  auto sparse_step = [&cfg, &pattern](const ResidualFn& F_, const Vec& x, const Vec& fx,
                                      Vec& dx, SolveStats& stats) {
    Eigen::SparseMatrix<double> J;
    try {
      J = fd_jacobian_structured(F_, x, cfg.fd_step, pattern);
    } catch (const std::runtime_error& e) {
      stats.message = e.what();
      return false;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      stats.message = "singular Jacobian (sparse factorisation failed)";
      return false;
    }
    dx = lu.solve(-fx);
    if (!dx.allFinite()) {
      stats.message = "singular Jacobian (non-finite Newton step)";
      return false;
    }
    return true;
  };
  return newton_loop(F, x0, cfg, sparse_step);
}

DiscreteTrajectory initial_guess(const OCProblem& prob, const SchemeParams& p,
                                 GuessStrategy strategy, Formulation form,
                                 const std::optional<Vec>& target_q,
                                 const GuessPath& path) {
  const int n = prob.system.n;
  const int m = prob.system.m;
  const int N = p.num_steps;
  DiscreteTrajectory traj;
  traj.q.resize(N + 1);
  traj.lam.resize(N + 1);
  traj.q[0] = prob.q0;
  for (int k = 1; k <= N; ++k) {
    const double s = static_cast<double>(k) / N;
    if (path)
      traj.q[k] = path(s);
    else if (target_q)
      traj.q[k] = prob.q0 + s * (*target_q - prob.q0);
    else
      traj.q[k] = prob.q0 + (k * p.dt) * prob.v0;
  }
  for (int k = 0; k <= N; ++k) traj.lam[k] = Vec::Zero(n);

  if (strategy == GuessStrategy::LinearInterp) {
    Vec v_end = divided_diff(traj.q[N - 1], traj.q[N], p.dt);
    Vec lam_end = -prob.terminal.dphi_dv(traj.q[N], v_end);
    for (int k = 0; k <= N; ++k)
      traj.lam[k] = (static_cast<double>(k) / N) * lam_end;
  }

  if (form == Formulation::Dependent) {
    traj.u1.resize(N);
    traj.u2.resize(N);
    for (int k = 0; k < N; ++k) {
      if (strategy == GuessStrategy::ZeroCostate) {
        traj.u1[k] = Vec::Zero(m);
        traj.u2[k] = Vec::Zero(m);
      } else {
        // Seed the controls from the minimisation relation at averaged points.
        Vec qb1 = averaged(p.gamma, traj.q[k], traj.q[k + 1]);
        Vec lb1 = averaged(p.gamma, traj.lam[k], traj.lam[k + 1]);
        Vec qb2 = averaged(1.0 - p.gamma, traj.q[k], traj.q[k + 1]);
        Vec lb2 = averaged(1.0 - p.gamma, traj.lam[k], traj.lam[k + 1]);
        traj.u1[k] = minimising_control(prob.system, qb1, lb1);
        traj.u2[k] = minimising_control(prob.system, qb2, lb2);
      }
    }
  }
  return traj;
}

}  // namespace varoc
