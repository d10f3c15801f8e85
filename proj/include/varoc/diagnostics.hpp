#pragma once

#include <map>
#include <string>
#include <vector>

#include "varoc/solver.hpp"

namespace varoc {

/// One-parameter affine symmetry action q -> A_s q + c_s, described by its
/// generators B = dA/ds|0 and d = dc/ds|0. The discrete Lagrangians inherit
/// the invariance when the control transformation is point-independent or when
/// beta = gamma; the flag records which hypothesis the model satisfies.
struct AffineSymmetry {
  Mat generator_linear;      // B
  Vec generator_translation; // d
  enum class PsiDependence { PointIndependent, BetaEqualsGamma };
  PsiDependence psi = PsiDependence::PointIndependent;

  static AffineSymmetry rotation_2d();
};

/// Per-node momenta of a discrete trajectory: p^- of the first interval at
/// node 0, p^+ of the left interval everywhere else. The matching defect
/// max_k ||p^+_k - p^-_k|| over interior nodes is reported separately.
struct NodalMomenta {
  std::vector<Vec> p_q;    // N+1
  std::vector<Vec> p_lam;  // N+1
  std::vector<double> matching_defect;  // per interior node, 0 at the ends
  double max_matching_defect = 0.0;
};

NodalMomenta nodal_momenta(const OCProblem& prob, const SchemeParams& p,
                           const DiscreteTrajectory& traj);

/// Noether integral I_k = p_q^T (B q + d) - p_lam^T B^T lam at every node.
std::vector<double> noether_affine(const DiscreteTrajectory& traj,
                                   const NodalMomenta& momenta,
                                   const AffineSymmetry& sym);

/// Planar rotation special case, n = 2:
/// I_k = lam_x p_lam_y - lam_y p_lam_x + x p_y - y p_x.
std::vector<double> noether_rotation_2d(const DiscreteTrajectory& traj,
                                        const NodalMomenta& momenta);

/// New control Hamiltonian and Pontryagin control Hamiltonian at the nodes,
/// with the nodal control from g(q_k) u_k = rho(q_k)^T lam_k and the
/// identification lambda_q = -p_q, lambda_v = lam, v = p_lam. H = -Htilde
/// pointwise.
std::pair<std::vector<double>, std::vector<double>> hamiltonians(
    const OCProblem& prob, const DiscreteTrajectory& traj,
    const NodalMomenta& momenta);

struct DiagnosticsSeries {
  std::vector<double> noether;
  std::vector<double> hamiltonian_new;
  std::vector<double> hamiltonian_pontryagin;
  NodalMomenta momenta;
  double max_noether_drift = 0.0;       // max_k |I_k - I_0|
  double max_hamiltonian_drift = 0.0;   // max_k |Htilde_k - Htilde_0|
};

DiagnosticsSeries compute_diagnostics(const OCProblem& prob, const SchemeParams& p,
                                      const DiscreteTrajectory& traj,
                                      const AffineSymmetry& sym);

/// Convergence study against a fine reference.
struct StudyScheme {
  std::string id;
  double alpha = 0.5, beta = 0.5, gamma = 0.5;
  Formulation form = Formulation::Independent;
};

struct StudyRow {
  std::string scheme_id;
  int num_steps = 0;
  double dt = 0.0;
  double error = 0.0;  // max_k ||q_k - q_ref|| + ||lam_k - lam_ref||
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::map<std::string, double> slopes;  // least-squares slope of log e vs log h
  bool all_converged = false;
  std::string failure;
};

struct StudyOptions {
  int reference_steps = 0;  // midpoint reference; must be >= 10 * max(N_list)
  SolverConfig solver;
  std::optional<Vec> guess_target;
  GuessPath guess_path;
};

/// Solves every (scheme, N) pair plus the midpoint reference, and fits the
/// observed orders. Aborts with a partial report when a constituent solve
/// fails. Solves run on the sparse Newton path.
StudyResult convergence_study(const OCProblem& prob,
                              const std::vector<StudyScheme>& schemes,
                              const std::vector<int>& step_counts,
                              const StudyOptions& options);

}  // namespace varoc
