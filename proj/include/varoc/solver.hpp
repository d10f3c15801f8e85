#pragma once

#include <Eigen/Sparse>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varoc/residual.hpp"

namespace varoc {

using ResidualFn = std::function<Vec(const Vec&)>;

struct SolverConfig {
  double tol = 1e-10;        // residual max-norm target
  int max_iter = 200;
  double fd_step = 1e-7;     // relative forward-difference step
  double backtrack = 0.5;    // step-halving factor
  double min_step = 1e-8;    // line search gives up below this
  bool verbose = false;
};

struct SolveStats {
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> step_sizes;        // accepted damping factors
  std::vector<double> residual_history;  // max-norm after each iterate
  bool converged = false;
  std::string message;
  double condition_estimate = std::numeric_limits<double>::quiet_NaN();
};

/// Forward-difference Jacobian; column j perturbs x_j by fd_step * (1 + |x_j|).
Mat fd_jacobian(const ResidualFn& F, const Vec& x, double fd_step);

/// Same forward-difference entries, compressed through the interval-local
/// coupling pattern: columns whose nodes are three apart are perturbed in one
/// evaluation.
Eigen::SparseMatrix<double> fd_jacobian_structured(const ResidualFn& F, const Vec& x,
                                                   double fd_step,
                                                   const SparsityPattern& pattern);

/// Damped Newton iteration on a square system. Dense LU with partial pivoting;
/// backtracking on ||F||^2 accepting a step t when the squared norm drops by
/// the factor (1 - 1e-4 t). Deterministic: identical inputs give bit-identical
/// iterates.
std::pair<Vec, SolveStats> newton_solve(const ResidualFn& F, const Vec& x0,
                                        const SolverConfig& cfg);

/// Newton iteration with the compressed FD Jacobian and a sparse LU
/// factorisation; same damping logic. Intended for the fine-grid reference
/// solves of convergence studies.
std::pair<Vec, SolveStats> newton_solve(const ResidualFn& F, const Vec& x0,
                                        const SolverConfig& cfg,
                                        const SparsityPattern& pattern);

enum class GuessStrategy { ZeroCostate, LinearInterp };

/// Model-supplied guess positions as a function of normalised time s = t/T.
/// Models whose straight-line chord crosses a dynamics singularity (the
/// orbital transfer does) provide one.
using GuessPath = std::function<Vec(double)>;

/// Initial iterate: q follows the guess path when one is given, otherwise
/// interpolates q0 -> target (or drifts freely when no target is known), with
/// zero costates; LinearInterp additionally ramps the costate toward its
/// terminal-cost value and seeds the interval controls from the minimisation
/// relation.
DiscreteTrajectory initial_guess(const OCProblem& prob, const SchemeParams& p,
                                 GuessStrategy strategy, Formulation form,
                                 const std::optional<Vec>& target_q = std::nullopt,
                                 const GuessPath& path = nullptr);

}  // namespace varoc
