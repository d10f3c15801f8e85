#pragma once

#include "varoc/residual.hpp"

namespace varoc {

/// Variables of the first-order direct transcription: nodal states and
/// velocities, multipliers for both first-order state equations (indices
/// 1..N stored from 0), interval controls, and initial-condition multipliers.
struct Dir1Variables {
  std::vector<Vec> q;      // N+1
  std::vector<Vec> v;      // N+1
  std::vector<Vec> lam_q;  // N  (lam_q[k] is the multiplier indexed k+1)
  std::vector<Vec> lam_v;  // N  (lam_v[k] is the multiplier indexed k+1)
  std::vector<Vec> u1, u2; // N
  Vec mu, nu;
};

/// Variables of the second-order direct transcription: nodal states, one
/// multiplier per interior node appended to the discretised SODE, controls.
struct Dir2Variables {
  std::vector<Vec> q;       // N+1
  std::vector<Vec> Lambda;  // N-1 (indices 1..N-1)
  std::vector<Vec> u1, u2;  // N
  Vec mu, nu;
};

/// Variable identification from a converged dependent solve:
/// lam_v_k = lam_k, lam_q_{k+1} = (lam_k - lam_{k+1})/h, v_k from the discrete
/// position equation (v_0 coincides with v_0^-), v_N = v_N^+.
Dir1Variables map_new_to_dir1(const DiscreteTrajectory& traj, const OCProblem& prob,
                              const SchemeParams& p);

/// Lambda_k = lam_k for the interior nodes; everything else copied.
Dir2Variables map_new_to_dir2(const DiscreteTrajectory& traj, const OCProblem& prob,
                              const SchemeParams& p);

/// Scalar objectives of the two transcriptions. Evaluated from the model maps
/// f, rho, g and phi only; the KKT oracles difference these scalars, keeping
/// them independent of the analytic-derivative code they cross-check.
double dir1_objective(const Dir1Variables& vars, const OCProblem& prob,
                      const SchemeParams& p);
double dir2_objective(const Dir2Variables& vars, const OCProblem& prob,
                      const SchemeParams& p);

/// KKT residual of the first-order transcription: central-difference
/// stationarity in every decision variable plus analytic constraint rows.
/// Blocks: stat_q, stat_v, stat_u1, stat_u2, con_vdot, con_qdot, con_q0,
/// con_v0.
ResidualVector kkt_residual_dir1(const Dir1Variables& vars, const OCProblem& prob,
                                 const SchemeParams& p, double fd_step = 1e-5);

/// KKT residual of the second-order transcription. Blocks: stat_q, stat_u1,
/// stat_u2, con_sode, con_q0, con_v0.
ResidualVector kkt_residual_dir2(const Dir2Variables& vars, const OCProblem& prob,
                                 const SchemeParams& p, double fd_step = 1e-5);

}  // namespace varoc
