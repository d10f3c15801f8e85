#pragma once

#include <string>
#include <utility>
#include <vector>

#include "varoc/scheme.hpp"

namespace varoc {

enum class Formulation { Independent, Dependent };

/// Discrete state-costate trajectory with optional interval controls
/// (dependent formulation) and recovered initial-condition multipliers.
struct DiscreteTrajectory {
  std::vector<Vec> q;    // N+1 nodes
  std::vector<Vec> lam;  // N+1 nodes
  std::vector<Vec> u1;   // N intervals (dependent only)
  std::vector<Vec> u2;   // N intervals (dependent only)
  Vec mu, nu;            // recovered post hoc

  int node_count() const { return static_cast<int>(q.size()); }
  bool has_controls() const { return !u1.empty(); }
};

struct BlockIndex {
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
};

/// Residual with a named block layout, in assembly order.
struct ResidualVector {
  Vec values;
  std::vector<std::pair<std::string, BlockIndex>> blocks;

  BlockIndex block(const std::string& name) const;
  Eigen::VectorXd segment(const std::string& name) const;
  double max_norm() const { return values.cwiseAbs().maxCoeff(); }
};

/// Unknown-vector layout: [q_0..q_N, lam_0..lam_N] for the independent
/// formulation, followed by [U1_0..U1_{N-1}, U2_0..U2_{N-1}] for the
/// dependent one. mu and nu are eliminated and recovered post hoc.
Eigen::Index unknown_count(Formulation form, int n, int m, int num_steps);
Vec pack_trajectory(const DiscreteTrajectory& traj, Formulation form);
DiscreteTrajectory unpack_trajectory(const Vec& x, Formulation form, int n, int m,
                                     int num_steps);

/// Residual of the control-independent optimality system. Blocks in order:
/// del_lambda (k=1..N-1), del_q (k=1..N-1), init_pos, init_vel, terminal_q,
/// terminal_lam. Total length 2n(N+1).
ResidualVector assemble_indep(const OCProblem& prob, const SchemeParams& p,
                              const DiscreteTrajectory& traj);

/// Residual of the control-dependent system. Blocks: del_lambda, del_q,
/// min_u1 (k=0..N-1), min_u2 (k=0..N-1), init_pos, init_vel, terminal_q,
/// terminal_lam. Total length 2n(N+1) + 2mN. The minimisation blocks are
/// imposed prefactor-free for every interval.
ResidualVector assemble_dep(const OCProblem& prob, const SchemeParams& p,
                            const DiscreteTrajectory& traj);

/// Initial-condition multipliers of a solved trajectory: nu = lam_0 and mu
/// from the q_0-stationarity line (mu = -p^-_{q,0} of the first interval).
std::pair<Vec, Vec> recover_multipliers(const OCProblem& prob, const SchemeParams& p,
                                        const DiscreteTrajectory& traj);

/// Augmented discrete objective values (terminal + boundary + action terms);
/// uses the trajectory's mu, nu fields.
double augmented_objective_indep(const OCProblem& prob, const SchemeParams& p,
                                 const DiscreteTrajectory& traj);
double augmented_objective_dep(const OCProblem& prob, const SchemeParams& p,
                               const DiscreteTrajectory& traj);

/// Interval-local coupling structure of the assembled systems: every residual
/// row and every unknown belongs to a grid node, and a row can only depend on
/// unknowns at most one node away. Enables compressed FD Jacobians (columns of
/// nodes three apart share no rows and can be perturbed together) and sparse
/// factorisation.
struct SparsityPattern {
  int num_nodes = 0;               // N+1
  std::vector<int> row_node;       // residual row -> owning node
  std::vector<int> col_node;       // unknown column -> owning node
  std::vector<int> col_slot;       // unknown column -> slot within its node
  int slots_per_node = 0;
};

SparsityPattern sparsity_pattern(Formulation form, int n, int m, int num_steps);

}  // namespace varoc
