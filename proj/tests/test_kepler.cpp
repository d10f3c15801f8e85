#include <cmath>

#include "doctest.h"
#include "test_systems.hpp"

using namespace varoc;
using namespace varoc::testing;

TEST_CASE("kepler drift, anchor and metric values") {
  ControlSystem sys = kepler_system(1.0, 10.0);
  Vec q(2), v(2);
  q << 4.0, 0.0;
  v << 0.0, 1.0;
  Vec f = sys.f(q, v);
  CHECK(f(0) == doctest::Approx(-0.625).epsilon(1e-14));
  CHECK(f(1) == doctest::Approx(0.0).epsilon(1e-14));

  Mat rho = sys.rho(q);
  CHECK(rho(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rho(1, 0) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(sys.metric_is_scalar());
  CHECK(*sys.constant_metric_scalar == 1.0);
  CHECK(sys.metric(q)(0, 0) == 1.0);
}

TEST_CASE("kepler evaluation at the origin reports the singularity") {
  ControlSystem sys = kepler_system(1.0, 10.0);
  Vec zero = Vec::Zero(2);
  CHECK_THROWS_AS(sys.f(zero, zero), SingularityError);
  CHECK_THROWS_AS(sys.rho(zero), SingularityError);
}

TEST_CASE("transfer horizon formula") {
  const double pi = 3.14159265358979323846;
  const double expected =
      1.5 * std::sqrt(4.0 * pi * pi * 729.0 / 80.0);  // (4+5)^3 = 729, 8GM = 80
  CHECK(transfer_horizon(1.5, 1.0, 10.0, 4.0, 5.0) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(transfer_horizon(1.5, 1.0, 10.0, 4.0, 5.0) ==
        doctest::Approx(28.45).epsilon(5e-4));
  CHECK(transfer_horizon(0.0, 1.0, 10.0, 4.0, 5.0) == 0.0);
}

TEST_CASE("initial circular state") {
  auto [q0, v0] = initial_circular_state(1.0, 10.0, 4.0);
  CHECK(q0(0) == 4.0);
  CHECK(q0(1) == 0.0);
  CHECK(v0(0) == 0.0);
  CHECK(v0(1) == doctest::Approx(1.58114).epsilon(1e-5));
  CHECK(v0.squaredNorm() * 4.0 == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("quadratic terminal cost and its gradients") {
  Vec qT(2), vT(2);
  qT << -5.0, 0.0;
  vT << 0.0, -std::sqrt(2.0);
  TerminalCost tc = quadratic_terminal_cost(qT, vT, Mat::Identity(2, 2),
                                            Mat::Identity(2, 2));
  CHECK(tc.phi(qT, vT) == 0.0);
  CHECK(tc.dphi_dq(qT, vT).cwiseAbs().maxCoeff() == 0.0);
  CHECK(tc.dphi_dv(qT, vT).cwiseAbs().maxCoeff() == 0.0);

  Vec q = qT + Vec::Unit(2, 0);
  CHECK(tc.phi(q, vT) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937 rng(81);
  std::vector<std::pair<Vec, Vec>> probes;
  for (int i = 0; i < 20; ++i)
    probes.emplace_back(random_vec(rng, 2, 5.0), random_vec(rng, 2, 2.0));
  DerivativeReport rep = check_terminal_cost(tc, probes, 1e-8);
  CHECK(rep.passed);
}

TEST_CASE("kepler model is rotation-equivariant") {
  ControlSystem sys = kepler_system(1.0, 10.0);
  std::mt19937 rng(82);
  std::uniform_real_distribution<double> angle(0.0, 6.2831853);
  for (int trial = 0; trial < 30; ++trial) {
    const double th = angle(rng);
    Mat rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Vec q = Vec::Constant(2, 3.0) + random_vec(rng, 2);
    Vec v = random_vec(rng, 2);
    Vec u = random_vec(rng, 1);
    CHECK((sys.f(rot * q, rot * v) - rot * sys.f(q, v)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sys.rho(rot * q) * u - rot * (sys.rho(q) * u)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("assembled kepler problem") {
  OCProblem prob = make_kepler_problem(KeplerParams::defaults(), 28.0);
  CHECK(prob.horizon == 28.0);
  CHECK(prob.q0(0) == 4.0);
  CHECK(prob.v0(1) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
  OCProblem formula = make_kepler_problem(KeplerParams::defaults());
  CHECK(formula.horizon == doctest::Approx(28.45).epsilon(5e-4));
}
