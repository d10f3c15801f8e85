// Acceptance suite: runs every advertised guarantee of the toolkit at desk
// scale and prints one pass/fail line per criterion.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "test_systems.hpp"
#include "varoc/direct.hpp"
#include "varoc/io.hpp"

using namespace varoc;
using namespace varoc::testing;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fig1Run {
  double alpha, gamma;
  Formulation form;
  SolveOutcome out;
  double solve_seconds = 0.0;
};

constexpr double kTol = 1e-10;

GuessPath fig1_guess_path() { return kepler_guess_path(); }

SolverConfig fig1_solver() {
  SolverConfig cfg;
  cfg.tol = kTol;
  cfg.max_iter = 200;
  return cfg;
}

}  // namespace

int main() {
  const OCProblem prob = kepler_problem(28.0);

  // --- criterion 1: free-system exactness ----------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    Vec q0(2), v0(2);
    q0 << 1.0, -2.0;
    v0 << 0.5, 0.25;
    OCProblem free = free_problem(2, q0, v0, 2.0);
    double worst = 0.0;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::array<double, 3>> params = {
        {0, 0, 0}, {1, 1, 1}, {1, 0, 1}, {0.5, 0.5, 0.5}};
    for (int trial = 0; trial < 8; ++trial)
      params.push_back({unit(rng), unit(rng), unit(rng)});
    for (const auto& abg : params) {
      SchemeParams p = make_scheme(abg[0], abg[1], abg[2], 20, free.horizon);
      DiscreteTrajectory ti = exact_free_trajectory(free, p, Formulation::Independent);
      worst = std::max(worst, assemble_indep(free, p, ti).max_norm());
      DiscreteTrajectory td = exact_free_trajectory(free, p, Formulation::Dependent);
      worst = std::max(worst, assemble_dep(free, p, td).max_norm());
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof detail, "max residual %.2e, %.2f s", worst, secs);
    report(1, "free-system exactness", worst <= 1e-12 && secs < 1.0, detail);
  }

  // --- Fig-1 solve set ------------------------------------------------------
  const std::vector<std::pair<double, double>> scheme_set = {
      {1.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}, {0.5, 1.0}};
  std::vector<Fig1Run> runs;
  for (const auto& [alpha, gamma] : scheme_set) {
    SchemeParams p = make_scheme(alpha, gamma, gamma, 280, prob.horizon);
    Fig1Run indep{alpha, gamma, Formulation::Independent, {}, 0.0};
    auto t0 = std::chrono::steady_clock::now();
    indep.out = solve_problem(prob, p, Formulation::Independent, fig1_solver(),
                              std::nullopt, false, fig1_guess_path());
    indep.solve_seconds = seconds_since(t0);
    runs.push_back(indep);

    Fig1Run dep{alpha, gamma, Formulation::Dependent, {}, 0.0};
    t0 = std::chrono::steady_clock::now();
    dep.out = solve_problem(prob, p, Formulation::Dependent, fig1_solver(),
                            std::nullopt, false, fig1_guess_path(),
                            GuessStrategy::LinearInterp);
    dep.solve_seconds = seconds_since(t0);
    runs.push_back(dep);
  }
  auto find_run = [&](double alpha, double gamma, Formulation form) -> const Fig1Run& {
    for (const Fig1Run& r : runs)
      if (r.alpha == alpha && r.gamma == gamma && r.form == form) return r;
    throw std::logic_error("missing run");
  };

  // --- criterion 2: Fig-1 reproduction --------------------------------------
  {
    const Fig1Run& euler = find_run(1.0, 1.0, Formulation::Independent);
    const Fig1Run& mid = find_run(0.5, 0.5, Formulation::Independent);
    bool ok = true;
    char detail[192];
    std::snprintf(detail, sizeof detail,
                  "alpha=1: res %.2e, %d iters, %.1f s; alpha=1/2: res %.2e, %d "
                  "iters, %.1f s",
                  euler.out.stats.residual_norm, euler.out.stats.iterations,
                  euler.solve_seconds, mid.out.stats.residual_norm,
                  mid.out.stats.iterations, mid.solve_seconds);
    for (const Fig1Run* r : {&euler, &mid})
      ok = ok && r->out.stats.converged && r->out.stats.residual_norm <= kTol &&
           r->out.stats.iterations <= 200 && r->solve_seconds <= 60.0;
    report(2, "Fig-1 reproduction (N=280, both schemes)", ok, detail);
  }

  // --- criterion 3: Noether conservation ------------------------------------
  {
    bool ok = true;
    double worst_ratio = 0.0;
    for (const Fig1Run& r : runs) {
      if (!r.out.stats.converged) {
        ok = false;
        continue;
      }
      SchemeParams p = make_scheme(r.alpha, r.gamma, r.gamma, 280, prob.horizon);
      DiagnosticsSeries diag =
          compute_diagnostics(prob, p, r.out.traj, AffineSymmetry::rotation_2d());
      const double bound = 1e-8 * (1.0 + std::abs(diag.noether[0]));
      worst_ratio = std::max(worst_ratio, diag.max_noether_drift / bound);
      ok = ok && diag.max_noether_drift <= bound;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst drift/bound ratio %.2e over %zu runs",
                  worst_ratio, runs.size());
    report(3, "Noether conservation (rotation generator)", ok, detail);
  }

  // --- criterion 4: formulation equivalence ---------------------------------
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& [alpha, gamma] : scheme_set) {
      const Fig1Run& a = find_run(alpha, gamma, Formulation::Independent);
      const Fig1Run& b = find_run(alpha, gamma, Formulation::Dependent);
      ok = ok && a.out.stats.residual_norm <= kTol && b.out.stats.residual_norm <= kTol;
      // both sides must be genuinely separate solves
      ok = ok && a.out.stats.iterations > 0 && b.out.stats.iterations > 0;
      double diff = 0.0;
      for (int k = 0; k <= 280; ++k) {
        diff = std::max(diff,
                        (a.out.traj.q[k] - b.out.traj.q[k]).cwiseAbs().maxCoeff());
        diff = std::max(diff,
                        (a.out.traj.lam[k] - b.out.traj.lam[k]).cwiseAbs().maxCoeff());
      }
      worst = std::max(worst, diff);
      ok = ok && diff <= 1e-6;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst state/costate gap %.2e", worst);
    report(4, "independent vs dependent equivalence (4 schemes)", ok, detail);
  }

  // --- criterion 5: direct-method equivalence -------------------------------
  {
    bool ok = true;
    double worst_kkt = 0.0, worst_obj = 0.0;
    for (const auto& [alpha, gamma] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.5}}) {
      const Fig1Run& dep = find_run(alpha, gamma, Formulation::Dependent);
      if (!dep.out.stats.converged) {
        ok = false;
        continue;
      }
      SchemeParams p = make_scheme(alpha, gamma, gamma, 280, prob.horizon);
      Dir1Variables d1 = map_new_to_dir1(dep.out.traj, prob, p);
      Dir2Variables d2 = map_new_to_dir2(dep.out.traj, prob, p);
      const double k1 = kkt_residual_dir1(d1, prob, p).max_norm();
      const double k2 = kkt_residual_dir2(d2, prob, p).max_norm();
      worst_kkt = std::max({worst_kkt, k1, k2});
      const double obj_new = augmented_objective_dep(prob, p, dep.out.traj);
      const double obj_dir2 = dir2_objective(d2, prob, p);
      const double rel = std::abs(obj_dir2 - obj_new) / (1.0 + std::abs(obj_new));
      worst_obj = std::max(worst_obj, rel);
      ok = ok && k1 <= 1e-8 && k2 <= 1e-8 && rel <= 1e-10;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst KKT %.2e, objective gap %.2e",
                  worst_kkt, worst_obj);
    report(5, "direct transcription oracles at the mapped solution", ok, detail);
  }

  // --- criterion 6: convergence orders ---------------------------------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    StudyOptions opt;
    opt.reference_steps = 2800;
    opt.solver = fig1_solver();
    opt.guess_path = fig1_guess_path();
    const std::vector<StudyScheme> schemes = {
        {"first-order-a", 1.0, 1.0, 1.0, Formulation::Independent},
        {"first-order-b", 1.0, 0.0, 0.0, Formulation::Independent},
        {"half-alpha", 0.5, 1.0, 1.0, Formulation::Independent},
        {"midpoint-family", 1.0, 0.5, 0.5, Formulation::Independent},
    };
    StudyResult study = convergence_study(prob, schemes, {35, 70, 140, 280}, opt);
    const double secs = seconds_since(t0);
    bool ok = study.all_converged && secs <= 900.0;
    auto in_range = [&](const std::string& id, double lo, double hi) {
      auto it = study.slopes.find(id);
      return it != study.slopes.end() && it->second >= lo && it->second <= hi;
    };
    ok = ok && in_range("first-order-a", 0.7, 1.3) &&
         in_range("first-order-b", 0.7, 1.3) && in_range("half-alpha", 1.7, 2.3) &&
         in_range("midpoint-family", 1.7, 2.3);
    std::string detail = study.all_converged ? "slopes" : study.failure;
    for (const auto& [id, slope] : study.slopes)
      detail += " " + id + "=" + std::to_string(slope);
    char buf[32];
    std::snprintf(buf, sizeof buf, "; %.0f s", secs);
    detail += buf;
    report(6, "empirical convergence orders", ok, detail);
  }

  // --- criterion 7: momentum matching ----------------------------------------
  {
    bool ok = true;
    double worst = 0.0;
    for (const Fig1Run& r : runs) {
      if (!r.out.stats.converged) {
        ok = false;
        continue;
      }
      SchemeParams p = make_scheme(r.alpha, r.gamma, r.gamma, 280, prob.horizon);
      NodalMomenta momenta = nodal_momenta(prob, p, r.out.traj);
      worst = std::max(worst, momenta.max_matching_defect);
      ok = ok && momenta.max_matching_defect <= 100.0 * kTol;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst interior defect %.2e (bound %.0e)",
                  worst, 100.0 * kTol);
    report(7, "interior momentum matching", ok, detail);
  }

  // --- criterion 8: Hamiltonian drift shrinks with h -------------------------
  {
    SchemeParams p280 = make_scheme(0.5, 0.5, 0.5, 280, prob.horizon);
    SchemeParams p560 = make_scheme(0.5, 0.5, 0.5, 560, prob.horizon);
    const Fig1Run& coarse = find_run(0.5, 0.5, Formulation::Independent);
    SolveOutcome fine = solve_problem(prob, p560, Formulation::Independent,
                                      fig1_solver(), std::nullopt, true,
                                      fig1_guess_path());
    bool ok = coarse.out.stats.converged && fine.stats.converged;
    double ratio = 0.0;
    if (ok) {
      DiagnosticsSeries dc = compute_diagnostics(prob, p280, coarse.out.traj,
                                                 AffineSymmetry::rotation_2d());
      DiagnosticsSeries df =
          compute_diagnostics(prob, p560, fine.traj, AffineSymmetry::rotation_2d());
      ratio = dc.max_hamiltonian_drift / df.max_hamiltonian_drift;
      ok = ratio >= 1.5;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "drift(h=0.1)/drift(h=0.05) = %.2f", ratio);
    report(8, "Hamiltonian drift ratio (second-order scheme)", ok, detail);
  }

  // --- criterion 9: derivative hygiene ---------------------------------------
  {
    io::RunConfig rc;
    rc.model_id = "kepler";
    rc.model_params = io::json::object();
    io::ModelSetup setup = io::build_model(rc);
    auto probes = setup.probe_sampler(100, 20260801u);
    DerivativeReport sys_rep = check_derivatives(setup.problem.system, probes);
    DerivativeReport cost_rep = check_terminal_cost(setup.problem.terminal, probes);
    char detail[96];
    std::snprintf(detail, sizeof detail, "system %.2e, terminal %.2e over 100 probes",
                  sys_rep.max_rel_error, cost_rep.max_rel_error);
    report(9, "analytic derivatives match finite differences", sys_rep.passed &&
           cost_rep.passed, detail);
  }

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures;
}
