#pragma once

#include <utility>

#include "varoc/control_system.hpp"

namespace varoc {

/// Planar low-thrust orbital transfer: point mass around a central body of
/// mass M, thrust acting in the azimuthal direction.
///
///   q'' = -G M q / r^3 + (-y, x)^T u / r,   g == 1.
struct KeplerParams {
  double grav = 1.0;       // gravitational constant G
  double mass = 10.0;      // central mass M
  double d_revs = 1.5;     // number of revolutions fixing the horizon
  double r_inner = 4.0;    // initial orbit radius
  double r_outer = 5.0;    // target orbit radius
  double x0 = 4.0;         // initial x-position (starts on the x-axis)
  Vec q_target;            // default (-r_outer, 0)
  Vec v_target;            // default circular velocity at r_outer, retrograde
  Mat weight_q, weight_v;  // SPD terminal weights, default identity

  static KeplerParams defaults();
};

/// The controlled Kepler system with analytic derivatives; n = 2, m = 1,
/// constant scalar metric g = 1. Throws SingularityError at r = 0.
ControlSystem kepler_system(double grav, double mass);

/// Fixed horizon T = d sqrt(4 pi^2 (r0 + rT)^3 / (8 G M)).
double transfer_horizon(double d_revs, double grav, double mass, double r_inner,
                        double r_outer);

/// Circular-orbit initial state q0 = (x0, 0), v0 = (0, sqrt(G M / x0)).
std::pair<Vec, Vec> initial_circular_state(double grav, double mass, double x0);

/// phi = (q - qT)^T Kq (q - qT) + (v - vT)^T Kv (v - vT) with exact gradients.
TerminalCost quadratic_terminal_cost(const Vec& q_target, const Vec& v_target,
                                     const Mat& weight_q, const Mat& weight_v);

/// Assembled transfer problem; the horizon defaults to the formula value and
/// may be overridden (the reference experiment uses T = 28).
OCProblem make_kepler_problem(const KeplerParams& params, double horizon_override = -1.0);

}  // namespace varoc
