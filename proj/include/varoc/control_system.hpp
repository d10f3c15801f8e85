#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "varoc/types.hpp"

namespace varoc {

/// An affine-controlled second-order system  q'' = f(q, q') + rho(q) u  with a
/// positive-definite control metric g(q) defining the running cost
/// (1/2) u^T g(q) u.
///
/// All callable members must be pure and reentrant: same inputs give the same
/// outputs and no shared mutable state, so concurrent evaluation is safe.
///
/// Rank-3 derivative objects are never stored; they are exposed only through
/// their contracted actions:
///   drho_dq_action(q, u, w)        = (D_q rho(q)[w]) u          in R^n
///   dmetric_dq_action(q, a, b, w)  = D_q[a^T g(q) b] . w        scalar
struct ControlSystem {
  int n = 0;  // state dimension
  int m = 0;  // control dimension, m <= n

  std::function<Vec(const Vec& q, const Vec& v)> f;
  std::function<Mat(const Vec& q, const Vec& v)> df_dq;  // n x n
  std::function<Mat(const Vec& q, const Vec& v)> df_dv;  // n x n

  std::function<Mat(const Vec& q)> rho;  // n x m, full column rank
  std::function<Vec(const Vec& q, const Vec& u, const Vec& w)> drho_dq_action;

  std::function<Mat(const Vec& q)> metric;  // m x m, SPD
  std::function<double(const Vec& q, const Vec& a, const Vec& b, const Vec& w)>
      dmetric_dq_action;

  // Set when g is a constant scalar multiple of the identity (the Kepler
  // example has g == 1); evaluation paths then skip the m x m factorization.
  std::optional<double> constant_metric_scalar;

  bool metric_is_scalar() const { return constant_metric_scalar.has_value(); }
};

/// Terminal cost phi(q(T), q'(T)) with its partial gradients.
struct TerminalCost {
  std::function<double(const Vec& q, const Vec& v)> phi;
  std::function<Vec(const Vec& q, const Vec& v)> dphi_dq;
  std::function<Vec(const Vec& q, const Vec& v)> dphi_dv;
};

/// Full continuous problem data: system, terminal cost, initial state, horizon.
struct OCProblem {
  ControlSystem system;
  TerminalCost terminal;
  Vec q0;
  Vec v0;
  double horizon = 0.0;  // T > 0

  void validate() const;
};

/// Solves g(q) x = rhs. Throws MetricSingularError if g(q) is not SPD.
Vec metric_solve(const ControlSystem& sys, const Vec& q, const Vec& rhs);

/// b(q) = rho(q) g(q)^{-1} rho(q)^T; symmetric PSD of rank m.
Mat eval_b(const ControlSystem& sys, const Vec& q);

/// Gradient with respect to q of the quadratic form lam^T b(q) lam.
///
/// Uses the contracted derivative actions: with u* = g^{-1} rho^T lam,
///   grad_j = 2 lam^T (D_q rho[e_j]) u*  -  D_q[u*^T g u*] . e_j.
Vec eval_grad_b(const ControlSystem& sys, const Vec& q, const Vec& lam);

/// u = g(q)^{-1} rho(q)^T lam, the control minimising the Hamiltonian.
Vec minimising_control(const ControlSystem& sys, const Vec& q, const Vec& lam);

/// grad_q of lam^T rho(q) u, with lam and u held fixed.
Vec grad_lam_rho_u(const ControlSystem& sys, const Vec& q, const Vec& lam,
                   const Vec& u);

/// grad_q of u^T g(q) u, with u held fixed.
Vec grad_u_metric_u(const ControlSystem& sys, const Vec& q, const Vec& u);

/// Central finite differences with step fd_step * (1 + |x_j|); the rapid
/// prototyping fallback for model derivatives.
constexpr double kFdFallbackStep = 1e-6;

/// Fills any unset derivative member (df_dq, df_dv, drho_dq_action,
/// dmetric_dq_action) with a central finite-difference evaluation of the
/// corresponding base map.
void fill_missing_derivatives_with_fd(ControlSystem& sys);

/// Builds a TerminalCost from phi alone, with FD gradients.
TerminalCost terminal_cost_with_fd(std::function<double(const Vec&, const Vec&)> phi);

struct DerivativeCheckEntry {
  std::string name;        // which derivative
  int probe_index = 0;
  double rel_error = 0.0;  // ||analytic - fd||_inf / (1 + ||fd||_inf)
};

struct DerivativeReport {
  std::vector<DerivativeCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed = false;  // all entries <= tol
  double tol = 1e-6;
};

/// Compares every analytic derivative of the system against central finite
/// differences at the given probe points. Report-only; never throws on a
/// mismatch.
DerivativeReport check_derivatives(const ControlSystem& sys,
                                   const std::vector<std::pair<Vec, Vec>>& probes,
                                   double tol = 1e-6);

/// Same check for terminal-cost gradients.
DerivativeReport check_terminal_cost(const TerminalCost& cost,
                                     const std::vector<std::pair<Vec, Vec>>& probes,
                                     double tol = 1e-6);

}  // namespace varoc
