#pragma once

#include <utility>

#include "varoc/control_system.hpp"
#include "varoc/types.hpp"

namespace varoc {

/// Parameters selecting one member of the low-order scheme family on the
/// uniform grid t_k = k h, N h = T.
///
/// alpha weights the two averaged evaluations of the discrete Lagrangian,
/// gamma places the averaged points inside each interval, and beta only fixes
/// the time stamps at which the interval controls U1, U2 are interpreted
/// (it never changes the Lagrangian value).
struct SchemeParams {
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 0.5;
  int num_steps = 0;  // N >= 2
  double dt = 0.0;    // h > 0, with N h = T

  void validate(double horizon) const;
};

/// N and h = T/N from a step count.
SchemeParams make_scheme(double alpha, double beta, double gamma, int num_steps,
                         double horizon);

/// One interval of a discrete state-costate curve.
struct NodePair {
  Vec q0, lam0;  // y_k
  Vec q1, lam1;  // y_{k+1}
};

/// Interval controls: U1 approximates u at the beta-averaged time, U2 at the
/// (1-beta)-averaged time.
struct IntervalControls {
  Vec u1, u2;
};

/// Shared averaging helpers; every module evaluates averaged points and
/// divided differences through these two so rounding is identical everywhere.
inline Vec averaged(double w, const Vec& a, const Vec& b) {
  return w * a + (1.0 - w) * b;
}
inline Vec divided_diff(const Vec& a, const Vec& b, double h) {
  return (b - a) / h;
}

/// Continuous Lagrangians on state-costate space (used by consistency tests
/// and the Hamiltonian diagnostics).
double lagrangian_continuous(const ControlSystem& sys, const Vec& q, const Vec& lam,
                             const Vec& v, const Vec& vlam);
double lagrangian_continuous_dep(const ControlSystem& sys, const Vec& q,
                                 const Vec& lam, const Vec& v, const Vec& vlam,
                                 const Vec& u);

/// Control-independent discrete Lagrangian of the (alpha, gamma) family.
double lagrangian_indep(const ControlSystem& sys, const NodePair& pair,
                        const SchemeParams& p);

/// Control-dependent discrete Lagrangian; beta does not enter the value.
double lagrangian_dep(const ControlSystem& sys, const NodePair& pair,
                      const IntervalControls& u, const SchemeParams& p);

/// Endpoint momenta -D1 Ld, +D2 Ld of one interval, split into q- and
/// lambda-slots. The lambda-slots are the interval velocities v^- and v^+.
struct IntervalMomenta {
  Vec p_minus_q, p_minus_lam;  // at y_k
  Vec p_plus_q, p_plus_lam;    // at y_{k+1}
};

IntervalMomenta interval_momenta_indep(const ControlSystem& sys, const NodePair& pair,
                                       const SchemeParams& p);
IntervalMomenta interval_momenta_dep(const ControlSystem& sys, const NodePair& pair,
                                     const IntervalControls& u, const SchemeParams& p);

/// Stacked (q-slot, lambda-slot) momenta conjugate to y_k and y_{k+1},
/// computed by analytic differentiation of the closed-form discrete
/// Lagrangian. Agrees with central finite differences of the Lagrangian.
std::pair<Vec, Vec> discrete_momenta_indep(const ControlSystem& sys,
                                           const NodePair& pair,
                                           const SchemeParams& p);
std::pair<Vec, Vec> discrete_momenta_dep(const ControlSystem& sys,
                                         const NodePair& pair,
                                         const IntervalControls& u,
                                         const SchemeParams& p);

/// Interval velocities alone (no q-slot derivative work).
Vec interval_velocity_minus_indep(const ControlSystem& sys, const NodePair& pair,
                                  const SchemeParams& p);
Vec interval_velocity_plus_indep(const ControlSystem& sys, const NodePair& pair,
                                 const SchemeParams& p);
/// The dependent-case velocities read only the q members of the pair; they are
/// independent of every costate value by construction.
Vec interval_velocity_minus_dep(const ControlSystem& sys, const Vec& qa, const Vec& qb,
                                const IntervalControls& u, const SchemeParams& p);
Vec interval_velocity_plus_dep(const ControlSystem& sys, const Vec& qa, const Vec& qb,
                               const IntervalControls& u, const SchemeParams& p);

/// Boundary velocities (v_0^-, v_N^+) from the first and last intervals.
std::pair<Vec, Vec> boundary_velocities_indep(const ControlSystem& sys,
                                              const NodePair& first,
                                              const NodePair& last,
                                              const SchemeParams& p);
std::pair<Vec, Vec> boundary_velocities_dep(const ControlSystem& sys,
                                            const NodePair& first,
                                            const IntervalControls& u_first,
                                            const NodePair& last,
                                            const IntervalControls& u_last,
                                            const SchemeParams& p);

}  // namespace varoc
