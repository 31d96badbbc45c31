// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "capa/optimizer.hpp"
#include "capa/power_alloc.hpp"
#include "test_util.hpp"

using namespace capa;

namespace {

CorrelationMatrix gram_for(const Scenario& sc, int order = 20) {
  const QuadratureGrid grid = build_grid(sc.aperture, order, order);
  return correlation_matrix(grid, sample_channel(grid, sc));
}

// Two-user scenario with mirrored geometry: users at (+x, y, z), (-x, y, z)
// with the default y polarization see identical marginals.
Scenario mirrored_pair() {
  Scenario sc;
  sc.users = {UserRecord{Vec3(2.0, 1.0, 20.0), Vec3(0.0, 1.0, 0.0)},
              UserRecord{Vec3(-2.0, 1.0, 20.0), Vec3(0.0, 1.0, 0.0)}};
  sc.wavelength = testutil::default_wavelength();
  sc.noise_power = testutil::kDefaultNoise;
  sc.power_budget = testutil::kDefaultPower;
  sc.aperture = testutil::default_aperture();
  return sc;
}

}  // namespace

TEST_CASE("fixed point, K=1: closed form lambda = t sigma^2 / q") {
  const Scenario sc = testutil::default_scenario(201, 1);
  const CorrelationMatrix q = gram_for(sc);
  const double q11 = q.Q(0, 0).real();
  for (double t : {0.25, 1.0, 4.0, 50.0}) {
    const LambdaVector lam = fixed_point_lambda(
        q, sc.noise_power, Eigen::VectorXd::Constant(1, t));
    const double expect = t * sc.noise_power / q11;
    CHECK(lam(0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("fixed point: vanishing targets give vanishing multipliers") {
  const Scenario sc = testutil::default_scenario(202, 3);
  const CorrelationMatrix q = gram_for(sc);
  const LambdaVector lam = fixed_point_lambda(
      q, sc.noise_power, Eigen::VectorXd::Constant(3, 1e-9));
  CHECK(lam.maxCoeff() < 1e-8);
  CHECK(lam.minCoeff() >= 0.0);
}

TEST_CASE("four-user targets bind with equality through the recovered beams") {
  const Scenario sc = testutil::default_scenario(203, 4);
  const CorrelationMatrix q = gram_for(sc);
  const Eigen::VectorXd t = Eigen::VectorXd::Ones(4);
  const PowerSolution sol = min_power_for_targets(q, sc.noise_power, t);
  const SinrVector g = sinr(q, sol.A, sc.noise_power);
  for (int k = 0; k < 4; ++k)
    CHECK(g(k) == doctest::Approx(1.0).epsilon(1e-6));
  // Strong duality: radiated power equals the sum of multipliers.
  CHECK(transmit_power(q, sol.A) ==
        doctest::Approx(sol.min_power).epsilon(1e-8));
  CHECK(sol.min_power ==
        doctest::Approx(sol.lambda.sum()).epsilon(1e-12));
}

TEST_CASE("min power, K=1: P* = t sigma^2 / q_11") {
  const Scenario sc = testutil::default_scenario(204, 1);
  const CorrelationMatrix q = gram_for(sc);
  const double t = 3.0;
  const PowerSolution sol = min_power_for_targets(
      q, sc.noise_power, Eigen::VectorXd::Constant(1, t));
  CHECK(sol.min_power ==
        doctest::Approx(t * sc.noise_power / q.Q(0, 0).real())
            .epsilon(1e-10));
}

TEST_CASE("doubling every target strictly increases the minimum power") {
  const Scenario sc = testutil::default_scenario(205, 3);
  const CorrelationMatrix q = gram_for(sc);
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(3, 0.8);
  const double p1 = min_power_for_targets(q, sc.noise_power, t).min_power;
  const double p2 =
      min_power_for_targets(q, sc.noise_power, 2.0 * t).min_power;
  CHECK(p2 > p1 * 1.5);
}

TEST_CASE("mirrored users give a swap-symmetric minimum power") {
  const CorrelationMatrix q = gram_for(mirrored_pair());
  Eigen::VectorXd t(2);
  t << 2.0, 0.5;
  Eigen::VectorXd ts(2);
  ts << 0.5, 2.0;
  const double noise = testutil::kDefaultNoise;
  const double pa = min_power_for_targets(q, noise, t).min_power;
  const double pb = min_power_for_targets(q, noise, ts).min_power;
  CHECK(pa == doctest::Approx(pb).epsilon(1e-8));
}

TEST_CASE("initial box arithmetic and scaling") {
  Scenario sc;
  sc.users = {UserRecord{Vec3(0.0, 0.0, 20.0), Vec3(0.0, 1.0, 0.0)}};
  sc.wavelength = testutil::default_wavelength();
  sc.noise_power = testutil::kDefaultNoise;
  sc.power_budget = testutil::kDefaultPower;
  sc.aperture = testutil::default_aperture();
  const CorrelationMatrix q = gram_for(sc, 40);
  const Eigen::VectorXd b =
      initial_box(q, sc.power_budget, sc.noise_power);
  CHECK(b(0) == doctest::Approx(101.6).epsilon(5e-3));
  const Eigen::VectorXd b2 =
      initial_box(q, 2.0 * sc.power_budget, sc.noise_power);
  CHECK(b2(0) == doctest::Approx(2.0 * b(0)).epsilon(1e-12));
}

TEST_CASE("box coordinate k ignores the other users") {
  Scenario sc = testutil::default_scenario(206, 1);
  const CorrelationMatrix q1 = gram_for(sc);
  const double b1 =
      initial_box(q1, sc.power_budget, sc.noise_power)(0);
  sc.users.push_back(UserRecord{Vec3(1.0, 1.0, 25.0), Vec3(0.0, 1.0, 0.0)});
  const CorrelationMatrix q2 = gram_for(sc);
  const double b2 =
      initial_box(q2, sc.power_budget, sc.noise_power)(0);
  CHECK(b1 == doctest::Approx(b2).epsilon(1e-10));
}

TEST_CASE("projection, K=1: the box corner sits on the boundary") {
  const Scenario sc = testutil::default_scenario(207, 1);
  const CorrelationMatrix q = gram_for(sc);
  const Eigen::VectorXd b =
      initial_box(q, sc.power_budget, sc.noise_power);
  const ProjectionResult pr = project_onto_feasible(
      q, sc.noise_power, sc.power_budget, b);
  CHECK(pr.alpha == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(pr.lambda.sum() ==
        doctest::Approx(sc.power_budget).epsilon(1e-8));
}

TEST_CASE("projection, K=4: interference pushes the corner inside") {
  const Scenario sc = testutil::default_scenario(208, 4);
  const CorrelationMatrix q = gram_for(sc);
  const Eigen::VectorXd b =
      initial_box(q, sc.power_budget, sc.noise_power);
  const ProjectionResult pr = project_onto_feasible(
      q, sc.noise_power, sc.power_budget, b);
  CHECK(pr.alpha < 1.0);
  CHECK(pr.alpha > 0.0);
  // Boundary point: full power spent, targets alpha*b achieved.
  CHECK(pr.lambda.sum() ==
        doctest::Approx(sc.power_budget).epsilon(1e-6));
  CHECK(transmit_power(q, pr.A) ==
        doctest::Approx(sc.power_budget).epsilon(1e-6));
  const SinrVector g = sinr(q, pr.A, sc.noise_power);
  for (int k = 0; k < 4; ++k)
    CHECK(g(k) == doctest::Approx(pr.alpha * b(k)).epsilon(1e-6));
}

TEST_CASE("projection handles zero-target coordinates by silencing users") {
  const Scenario sc = testutil::default_scenario(209, 3);
  const CorrelationMatrix q = gram_for(sc);
  Eigen::VectorXd z = initial_box(q, sc.power_budget, sc.noise_power);
  z(1) = 0.0;
  const ProjectionResult pr = project_onto_feasible(
      q, sc.noise_power, sc.power_budget, z);
  CHECK(pr.lambda(1) == 0.0);
  CHECK(pr.A.A.col(1).norm() == 0.0);
  const SinrVector g = sinr(q, pr.A, sc.noise_power);
  CHECK(g(0) == doctest::Approx(pr.alpha * z(0)).epsilon(1e-6));
  CHECK(g(2) == doctest::Approx(pr.alpha * z(2)).epsilon(1e-6));
}

TEST_CASE("polyblock, K=1: three iterations to the closed form") {
  const Scenario sc = testutil::default_scenario(210, 1);
  const CorrelationMatrix q = gram_for(sc);
  const PolyblockResult res = polyblock_maximize(
      q, sc.noise_power, sc.power_budget, sum_rate_utility());
  CHECK(res.converged);
  CHECK(res.iterations <= 3);
  const double b =
      sc.power_budget * q.Q(0, 0).real() / sc.noise_power;
  CHECK(res.theta(0) == doctest::Approx(b).epsilon(1e-4));
  CHECK(res.utility ==
        doctest::Approx(std::log2(1.0 + b)).epsilon(1e-4));
}

TEST_CASE("polyblock dominates MMSE with waterfilling, K=2") {
  const Scenario sc = testutil::default_scenario(211, 2);
  const CorrelationMatrix q = gram_for(sc);

  const PowerVector unit = PowerVector::Ones(2);
  const BeamCoefficients dirs =
      mmse(q, sc.power_budget, sc.noise_power, unit);
  const Eigen::VectorXd g = effective_gains(q, dirs);
  const PowerVector p =
      waterfill_sum_rate(g, sc.noise_power, sc.power_budget);
  BeamCoefficients a = dirs;
  for (int k = 0; k < 2; ++k) a.A.col(k) *= std::sqrt(p(k));
  const double mmse_rate = sum_rate(sinr(q, a, sc.noise_power));

  OptimizerOptions opt;
  opt.epsilon_gap = 1e-5;
  opt.epsilon_bisect = 1e-9;
  opt.max_iter = 20000;
  const PolyblockResult res = polyblock_maximize(
      q, sc.noise_power, sc.power_budget, sum_rate_utility(), opt);
  CHECK(res.converged);
  CHECK(res.utility >= mmse_rate - 1e-6);
  // Bound sandwich at exit.
  CHECK(res.upper_bound >= res.utility - 1e-12);
  CHECK(res.upper_bound - res.utility <= 1e-5 + 1e-9);
}

TEST_CASE("trace bounds are monotone and the vertex count stays bounded") {
  const Scenario sc = testutil::default_scenario(2182, 3);
  const CorrelationMatrix q = gram_for(sc);
  const PolyblockResult res = polyblock_maximize(
      q, sc.noise_power, sc.power_budget, sum_rate_utility());
  CHECK(res.converged);
  REQUIRE(!res.trace.empty());
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].upper_bound <= res.trace[i - 1].upper_bound + 1e-9);
    CHECK(res.trace[i].lower_bound >= res.trace[i - 1].lower_bound - 1e-9);
    const int n = res.trace[i].iteration;
    CHECK(res.trace[i].vertex_count <= 1 + n * (3 - 1));
  }
  const TraceRow& last = res.trace.back();
  CHECK(last.upper_bound - last.lower_bound <= 1e-2 + 1e-9);
}

TEST_CASE("recovered beamformer reproduces the incumbent SINRs") {
  const Scenario sc = testutil::default_scenario(213, 2);
  const CorrelationMatrix q = gram_for(sc);
  const PolyblockResult res = polyblock_maximize(
      q, sc.noise_power, sc.power_budget, sum_rate_utility());
  const SinrVector g = sinr(q, res.A, sc.noise_power);
  for (int k = 0; k < 2; ++k)
    CHECK(g(k) == doctest::Approx(res.theta(k)).epsilon(1e-5));
  CHECK(transmit_power(q, res.A) <= sc.power_budget * (1.0 + 1e-6));
}

TEST_CASE("non-convergent fixed point raises with the last residual") {
  const Scenario sc = testutil::default_scenario(214, 4);
  const CorrelationMatrix q = gram_for(sc);
  OptimizerOptions opt;
  opt.fixed_point_max_iter = 1;
  opt.fixed_point_tol = 1e-16;
  CHECK_THROWS_AS((void)fixed_point_lambda(
                      q, sc.noise_power, Eigen::VectorXd::Ones(4), opt),
                  std::runtime_error);
}
