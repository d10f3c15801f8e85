#include <cmath>
#include <set>

#include "doctest.h"
#include "test_systems.hpp"

using namespace varoc;
using namespace varoc::testing;

namespace {

SolverConfig tight_solver() {
  SolverConfig cfg;
  cfg.tol = 1e-11;
  return cfg;
}

}  // namespace

TEST_CASE("free-particle straight line with zero costates has zero residual") {
  Vec q0(2), v0(2);
  q0 << 1.0, -2.0;
  v0 << 0.5, 0.25;
  OCProblem prob = free_problem(2, q0, v0, 2.0);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    SchemeParams p = make_scheme(unit(rng), unit(rng), unit(rng), 20, prob.horizon);
    DiscreteTrajectory ti = exact_free_trajectory(prob, p, Formulation::Independent);
    CHECK(assemble_indep(prob, p, ti).max_norm() <= 1e-12);
    DiscreteTrajectory td = exact_free_trajectory(prob, p, Formulation::Dependent);
    CHECK(assemble_dep(prob, p, td).max_norm() <= 1e-12);
  }
}

TEST_CASE("residual lengths match the unknown counts") {
  Vec q0(2), v0(2);
  q0 << 1.0, 0.0;
  v0 << 0.0, 1.0;
  OCProblem prob = free_problem(2, q0, v0, 1.0);
  SchemeParams p = make_scheme(0.5, 0.5, 0.5, 5, prob.horizon);
  DiscreteTrajectory ti = exact_free_trajectory(prob, p, Formulation::Independent);
  CHECK(assemble_indep(prob, p, ti).values.size() == 24);  // 2n(N+1)

  OCProblem kep = kepler_problem();
  kep.horizon = 1.0;
  DiscreteTrajectory td = initial_guess(kep, p, GuessStrategy::ZeroCostate,
                                        Formulation::Dependent);
  CHECK(assemble_dep(kep, p, td).values.size() == 34);  // 2n(N+1) + 2mN

  for (int n_steps : {4, 9, 17}) {
    SchemeParams ps = make_scheme(0.3, 0.7, 0.9, n_steps, kep.horizon);
    DiscreteTrajectory t = initial_guess(kep, ps, GuessStrategy::ZeroCostate,
                                         Formulation::Dependent);
    CHECK(assemble_dep(kep, ps, t).values.size() ==
          unknown_count(Formulation::Dependent, 2, 1, n_steps));
    CHECK(pack_trajectory(t, Formulation::Dependent).size() ==
          unknown_count(Formulation::Dependent, 2, 1, n_steps));
  }
}

TEST_CASE("pack and unpack are inverse") {
  std::mt19937 rng(42);
  DiscreteTrajectory traj;
  for (int k = 0; k <= 8; ++k) {
    traj.q.push_back(random_vec(rng, 2));
    traj.lam.push_back(random_vec(rng, 2));
  }
  for (int k = 0; k < 8; ++k) {
    traj.u1.push_back(random_vec(rng, 1));
    traj.u2.push_back(random_vec(rng, 1));
  }
  Vec x = pack_trajectory(traj, Formulation::Dependent);
  DiscreteTrajectory back = unpack_trajectory(x, Formulation::Dependent, 2, 1, 8);
  for (int k = 0; k <= 8; ++k) {
    CHECK((traj.q[k] - back.q[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.lam[k] - back.lam[k]).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int k = 0; k < 8; ++k) {
    CHECK((traj.u1[k] - back.u1[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.u2[k] - back.u2[k]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("input validation") {
  OCProblem kep = kepler_problem();
  SchemeParams p = make_scheme(1.0, 1.0, 1.0, 5, kep.horizon);
  DiscreteTrajectory traj = initial_guess(kep, p, GuessStrategy::ZeroCostate,
                                          Formulation::Independent);
  DiscreteTrajectory short_traj = traj;
  short_traj.q.pop_back();
  CHECK_THROWS_AS(assemble_indep(kep, p, short_traj), DimensionError);
  DiscreteTrajectory bad = traj;
  bad.lam[2](0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(assemble_indep(kep, p, bad), std::invalid_argument);
  // control sequences are rejected by the independent assembly
  DiscreteTrajectory with_controls = traj;
  with_controls.u1.assign(5, Vec::Zero(1));
  with_controls.u2.assign(5, Vec::Zero(1));
  CHECK_THROWS_AS(assemble_indep(kep, p, with_controls), DimensionError);
}

TEST_CASE("converged Kepler solve: local uniqueness and momentum matching") {
  OCProblem prob = kepler_problem();
  SchemeParams p = make_scheme(1.0, 1.0, 1.0, 70, prob.horizon);
  SolveOutcome solved = solve_kepler(prob, p, Formulation::Independent, tight_solver());
  REQUIRE(solved.stats.converged);
  ResidualVector base = assemble_indep(prob, p, solved.traj);
  CHECK(base.max_norm() <= 1e-11);

  // local uniqueness probe
  DiscreteTrajectory perturbed = solved.traj;
  perturbed.u1.clear();
  perturbed.u2.clear();
  perturbed.lam[35](0) += 1e-3;
  CHECK(assemble_indep(prob, p, perturbed).max_norm() > 1e-6);

  // interior momentum matching
  NodalMomenta momenta = nodal_momenta(prob, p, solved.traj);
  CHECK(momenta.max_matching_defect <= 100.0 * 1e-11);
}

TEST_CASE("recover_multipliers") {
  Vec q0(2), v0(2);
  q0 << 0.3, 0.0;
  v0 << 1.0, -0.5;
  OCProblem prob = free_problem(2, q0, v0, 1.5);
  SchemeParams p = make_scheme(0.5, 0.5, 0.5, 10, prob.horizon);
  DiscreteTrajectory traj = exact_free_trajectory(prob, p, Formulation::Independent);
  auto [mu, nu] = recover_multipliers(prob, p, traj);
  CHECK(mu.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(nu.cwiseAbs().maxCoeff() < 1e-14);

  // nu = lam_0 holds for any trajectory, solved or not.
  std::mt19937 rng(43);
  for (int k = 0; k <= 10; ++k) traj.lam[k] = random_vec(rng, 2);
  auto [mu2, nu2] = recover_multipliers(prob, p, traj);
  CHECK((nu2 - traj.lam[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("independent and dependent formulations give the same solution") {
  OCProblem prob = kepler_problem();
  SchemeParams p = make_scheme(1.0, 1.0, 1.0, 70, prob.horizon);
  SolveOutcome indep = solve_kepler(prob, p, Formulation::Independent, tight_solver());
  REQUIRE(indep.stats.converged);
  SolveOutcome dep = solve_problem(prob, p, Formulation::Dependent, tight_solver(),
                                   std::nullopt, false, kepler_guess_path(),
                                   GuessStrategy::LinearInterp);
  CHECK(dep.stats.iterations > 0);  // a genuinely separate solve
  REQUIRE(indep.stats.converged);
  REQUIRE(dep.stats.converged);
  double diff = 0.0;
  for (int k = 0; k <= p.num_steps; ++k) {
    diff = std::max(diff, (indep.traj.q[k] - dep.traj.q[k]).cwiseAbs().maxCoeff());
    diff = std::max(diff, (indep.traj.lam[k] - dep.traj.lam[k]).cwiseAbs().maxCoeff());
  }
  CHECK(diff <= 1e-6);
  CHECK((indep.traj.mu - dep.traj.mu).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((indep.traj.nu - dep.traj.nu).cwiseAbs().maxCoeff() <= 1e-6);

  // the converged minimisation blocks reproduce the minimising controls
  for (int k = 0; k < p.num_steps; ++k) {
    Vec qb = averaged(p.gamma, dep.traj.q[k], dep.traj.q[k + 1]);
    Vec lb = averaged(p.gamma, dep.traj.lam[k], dep.traj.lam[k + 1]);
    CHECK((dep.traj.u1[k] - minimising_control(prob.system, qb, lb))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
  }
}

TEST_CASE("dependent residual depends on boundary costates only where it must") {
  OCProblem prob = kepler_problem();
  const int N = 12;
  SchemeParams p = make_scheme(0.6, 0.4, 0.4, N, prob.horizon);
  std::mt19937 rng(44);
  DiscreteTrajectory traj;
  for (int k = 0; k <= N; ++k) {
    traj.q.push_back(Vec(Vec::Constant(2, 4.0) + random_vec(rng, 2)));
    traj.lam.push_back(random_vec(rng, 2));
  }
  for (int k = 0; k < N; ++k) {
    traj.u1.push_back(random_vec(rng, 1));
    traj.u2.push_back(random_vec(rng, 1));
  }
  ResidualVector base = assemble_dep(prob, p, traj);

  auto changed_rows = [&](const DiscreteTrajectory& t) {
    ResidualVector r = assemble_dep(prob, p, t);
    std::set<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < r.values.size(); ++i)
      if (r.values(i) != base.values(i)) rows.insert(i);
    return rows;
  };
  auto block_rows = [&](const std::string& name, int k_first, int k_last, int stride,
                        int k_offset) {
    std::set<Eigen::Index> rows;
    BlockIndex idx = base.block(name);
    for (int k = k_first; k <= k_last; ++k)
      for (int i = 0; i < stride; ++i)
        rows.insert(idx.offset + (k - k_offset) * stride + i);
    return rows;
  };

  DiscreteTrajectory t0 = traj;
  t0.lam[0](1) += 0.125;
  std::set<Eigen::Index> allowed = block_rows("del_q", 1, 1, 2, 1);
  allowed.merge(block_rows("min_u1", 0, 0, 1, 0));
  allowed.merge(block_rows("min_u2", 0, 0, 1, 0));
  for (Eigen::Index row : changed_rows(t0))
    CHECK(allowed.count(row) == 1);

  DiscreteTrajectory tN = traj;
  tN.lam[N](0) -= 0.25;
  std::set<Eigen::Index> allowed_n = block_rows("del_q", N - 1, N - 1, 2, 1);
  allowed_n.merge(block_rows("min_u1", N - 1, N - 1, 1, 0));
  allowed_n.merge(block_rows("min_u2", N - 1, N - 1, 1, 0));
  allowed_n.merge(block_rows("terminal_q", 0, 0, 2, 0));
  allowed_n.merge(block_rows("terminal_lam", 0, 0, 2, 0));
  for (Eigen::Index row : changed_rows(tN))
    CHECK(allowed_n.count(row) == 1);

  // del_lambda, init_pos and init_vel rows are bit-identical in both probes.
  for (const char* name : {"del_lambda", "init_pos", "init_vel"}) {
    BlockIndex idx = base.block(name);
    ResidualVector r0 = assemble_dep(prob, p, t0);
    ResidualVector rN = assemble_dep(prob, p, tN);
    for (Eigen::Index i = idx.offset; i < idx.offset + idx.length; ++i) {
      CHECK(r0.values(i) == base.values(i));
      CHECK(rN.values(i) == base.values(i));
    }
  }
}
