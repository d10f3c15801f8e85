#include "varoc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace varoc {

AffineSymmetry AffineSymmetry::rotation_2d() {
  AffineSymmetry sym;
  sym.generator_linear = Mat(2, 2);
  sym.generator_linear << 0.0, -1.0, 1.0, 0.0;
  sym.generator_translation = Vec::Zero(2);
  sym.psi = PsiDependence::PointIndependent;
  return sym;
}

NodalMomenta nodal_momenta(const OCProblem& prob, const SchemeParams& p,
                           const DiscreteTrajectory& traj) {
  const int N = p.num_steps;
  const bool dep = traj.has_controls();
  std::vector<IntervalMomenta> im(N);
  for (int k = 0; k < N; ++k) {
    NodePair pair{traj.q[k], traj.lam[k], traj.q[k + 1], traj.lam[k + 1]};
    im[k] = dep ? interval_momenta_dep(prob.system, pair,
                                       IntervalControls{traj.u1[k], traj.u2[k]}, p)
                : interval_momenta_indep(prob.system, pair, p);
  }
  NodalMomenta out;
  out.p_q.resize(N + 1);
  out.p_lam.resize(N + 1);
  out.matching_defect.assign(N + 1, 0.0);
  out.p_q[0] = im[0].p_minus_q;
  out.p_lam[0] = im[0].p_minus_lam;
  for (int k = 1; k <= N; ++k) {
    out.p_q[k] = im[k - 1].p_plus_q;
    out.p_lam[k] = im[k - 1].p_plus_lam;
    if (k <= N - 1) {
      double defect =
          std::max((im[k - 1].p_plus_q - im[k].p_minus_q).cwiseAbs().maxCoeff(),
                   (im[k - 1].p_plus_lam - im[k].p_minus_lam).cwiseAbs().maxCoeff());
      out.matching_defect[k] = defect;
      out.max_matching_defect = std::max(out.max_matching_defect, defect);
    }
  }
  return out;
}

std::vector<double> noether_affine(const DiscreteTrajectory& traj,
                                   const NodalMomenta& momenta,
                                   const AffineSymmetry& sym) {
  const int nodes = traj.node_count();
  std::vector<double> series(nodes);
  const Mat& B = sym.generator_linear;
  const Vec& d = sym.generator_translation;
  for (int k = 0; k < nodes; ++k) {
    series[k] = momenta.p_q[k].dot(B * traj.q[k] + d) -
                momenta.p_lam[k].dot(B.transpose() * traj.lam[k]);
  }
  return series;
}

std::vector<double> noether_rotation_2d(const DiscreteTrajectory& traj,
                                        const NodalMomenta& momenta) {
  require(traj.q.at(0).size() == 2, "noether_rotation_2d needs a planar state");
  const int nodes = traj.node_count();
  std::vector<double> series(nodes);
  for (int k = 0; k < nodes; ++k) {
    const Vec& q = traj.q[k];
    const Vec& lam = traj.lam[k];
    const Vec& pq = momenta.p_q[k];
    const Vec& pl = momenta.p_lam[k];
    series[k] = lam(0) * pl(1) - lam(1) * pl(0) + q(0) * pq(1) - q(1) * pq(0);
  }
  return series;
}

std::pair<std::vector<double>, std::vector<double>> hamiltonians(
    const OCProblem& prob, const DiscreteTrajectory& traj,
    const NodalMomenta& momenta) {
  const ControlSystem& sys = prob.system;
  const int nodes = traj.node_count();
  std::vector<double> h_new(nodes), h_pmp(nodes);
  for (int k = 0; k < nodes; ++k) {
    const Vec& q = traj.q[k];
    const Vec& lam = traj.lam[k];
    const Vec& pq = momenta.p_q[k];
    const Vec& plam = momenta.p_lam[k];
    Vec ustar = minimising_control(sys, q, lam);
    double cost = sys.metric_is_scalar()
                      ? (*sys.constant_metric_scalar) * ustar.squaredNorm()
                      : ustar.dot(sys.metric(q) * ustar);
    Vec force = sys.f(q, plam) + sys.rho(q) * ustar;
    h_new[k] = pq.dot(plam) - lam.dot(force) + 0.5 * cost;
    // lambda_q = -p_q, lambda_v = lam, v = p_lam
    h_pmp[k] = (-pq).dot(plam) + lam.dot(force) - 0.5 * cost;
  }
  return {h_new, h_pmp};
}

DiagnosticsSeries compute_diagnostics(const OCProblem& prob, const SchemeParams& p,
                                      const DiscreteTrajectory& traj,
                                      const AffineSymmetry& sym) {
  DiagnosticsSeries d;
  d.momenta = nodal_momenta(prob, p, traj);
  d.noether = noether_affine(traj, d.momenta, sym);
  auto [h_new, h_pmp] = hamiltonians(prob, traj, d.momenta);
  d.hamiltonian_new = std::move(h_new);
  d.hamiltonian_pontryagin = std::move(h_pmp);
  for (size_t k = 0; k < d.noether.size(); ++k) {
    d.max_noether_drift =
        std::max(d.max_noether_drift, std::abs(d.noether[k] - d.noether[0]));
    d.max_hamiltonian_drift = std::max(
        d.max_hamiltonian_drift, std::abs(d.hamiltonian_new[k] - d.hamiltonian_new[0]));
  }
  return d;
}

namespace {

struct SolvedGrid {
  DiscreteTrajectory traj;
  bool ok = false;
  std::string message;
};

SolvedGrid solve_on_grid(const OCProblem& prob, double alpha, double beta, double gamma,
                         int num_steps, Formulation form, const StudyOptions& opt) {
  SolvedGrid out;
  SchemeParams p = make_scheme(alpha, beta, gamma, num_steps, prob.horizon);
  DiscreteTrajectory guess = initial_guess(prob, p, GuessStrategy::ZeroCostate, form,
                                           opt.guess_target, opt.guess_path);
  Vec x0 = pack_trajectory(guess, form);
  ResidualFn F = [&prob, &p, form](const Vec& x) {
    DiscreteTrajectory t =
        unpack_trajectory(x, form, prob.system.n, prob.system.m, p.num_steps);
    return form == Formulation::Dependent ? assemble_dep(prob, p, t).values
                                          : assemble_indep(prob, p, t).values;
  };
  SparsityPattern pat = sparsity_pattern(form, prob.system.n, prob.system.m, num_steps);
  auto [x, stats] = newton_solve(F, x0, opt.solver, pat);
  out.ok = stats.converged;
  out.message = stats.message;
  out.traj = unpack_trajectory(x, form, prob.system.n, prob.system.m, num_steps);
  return out;
}

double fit_slope(const std::vector<double>& log_h, const std::vector<double>& log_e) {
  const double n = static_cast<double>(log_h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < log_h.size(); ++i) {
    sx += log_h[i];
    sy += log_e[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_e[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

StudyResult convergence_study(const OCProblem& prob,
                              const std::vector<StudyScheme>& schemes,
                              const std::vector<int>& step_counts,
                              const StudyOptions& options) {
  StudyResult result;
  require(!schemes.empty() && !step_counts.empty(),
          "study needs at least one scheme and one step count");
  const int max_steps = *std::max_element(step_counts.begin(), step_counts.end());
  require(options.reference_steps >= 10 * max_steps,
          "reference grid must be at least ten times finer than the study grids");

  SolvedGrid ref = solve_on_grid(prob, 0.5, 0.5, 0.5, options.reference_steps,
                                 Formulation::Independent, options);
  if (!ref.ok) {
    result.failure = "reference solve failed: " + ref.message;
    return result;
  }

  for (const StudyScheme& sch : schemes) {
    std::vector<double> log_h, log_e;
    for (int N : step_counts) {
      SolvedGrid run = solve_on_grid(prob, sch.alpha, sch.beta, sch.gamma, N,
                                     sch.form, options);
      if (!run.ok) {
        result.failure = "solve failed for scheme " + sch.id + " at N = " +
                         std::to_string(N) + ": " + run.message;
        return result;
      }
      // Compare at shared nodes only; grids with N | reference_steps share
      // every coarse node.
      double err = 0.0;
      for (int k = 0; k <= N; ++k) {
        const long long idx_num = static_cast<long long>(k) * options.reference_steps;
        if (idx_num % N != 0) continue;
        const int j = static_cast<int>(idx_num / N);
        err = std::max(err, (run.traj.q[k] - ref.traj.q[j]).norm() +
                                (run.traj.lam[k] - ref.traj.lam[j]).norm());
      }
      const double h = prob.horizon / N;
      result.rows.push_back({sch.id, N, h, err});
      log_h.push_back(std::log(h));
      log_e.push_back(std::log(err));
    }
    result.slopes[sch.id] = fit_slope(log_h, log_e);
  }
  result.all_converged = true;
  return result;
}

}  // namespace varoc
