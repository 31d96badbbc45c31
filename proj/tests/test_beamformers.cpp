// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "capa/beamformers.hpp"
#include "test_util.hpp"

using namespace capa;

namespace {

struct Setup {
  Scenario sc;
  QuadratureGrid grid;
  ChannelSamples cs;
  CorrelationMatrix q;
};

Setup make_setup(std::uint64_t seed, int k, int order = 20) {
  Setup s{testutil::default_scenario(seed, k),
          build_grid(testutil::default_aperture(), order, order),
          {},
          {}};
  s.cs = sample_channel(s.grid, s.sc);
  s.q = correlation_matrix(s.grid, s.cs);
  return s;
}

PowerVector equal_split(int k, double total) {
  return PowerVector::Constant(k, total / k);
}

// Angle between two complex columns, invariant to phase and scale.
double column_angle(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

}  // namespace

TEST_CASE("MRT: exact per-user power and Cauchy-Schwarz equality") {
  const Setup s = make_setup(101, 4);
  const PowerVector p = equal_split(4, testutil::kDefaultPower);
  const BeamCoefficients a = mrt(s.q, p);
  CHECK(transmit_power(s.q, a) ==
        doctest::Approx(testutil::kDefaultPower).epsilon(1e-12));
  const Eigen::MatrixXcd m = received_amplitudes(s.q, a);
  for (int k = 0; k < 4; ++k) {
    // Unit-power alignment: |<h_k, w_k>|^2 = q_kk * \int |w_k|^2.
    const double q_kk = s.q.Q(k, k).real();
    CHECK(std::abs(m(k, k)) ==
          doctest::Approx(std::sqrt(p(k) * q_kk)).epsilon(1e-12));
    const double lhs = std::norm(m(k, k));
    const double rhs =
        q_kk * (a.A.col(k).adjoint() * s.q.Q * a.A.col(k))(0).real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // Any column not proportional to e_k stays strictly below the bound.
  Eigen::VectorXcd off = a.A.col(0);
  off(1) += cxd(0.05, 0.02);
  const cxd recv = (s.q.Q.row(0) * off)(0);
  const double bound =
      s.q.Q(0, 0).real() * (off.adjoint() * s.q.Q * off)(0).real();
  CHECK(std::norm(recv) < bound * (1.0 - 1e-6));
}

TEST_CASE("MRT rejects a degenerate channel") {
  CorrelationMatrix q;
  q.Q = Eigen::MatrixXcd::Zero(2, 2);
  q.Q(0, 0) = 1.0;
  CHECK_THROWS_AS((void)mrt(q, equal_split(2, 1e-3)), std::runtime_error);
}

TEST_CASE("ZF: diagonal received amplitudes, exact budget") {
  const Setup s = make_setup(102, 4);
  const PowerVector p = equal_split(4, testutil::kDefaultPower);
  const BeamCoefficients a = zf(s.q, p);
  const Eigen::MatrixXcd m = received_amplitudes(s.q, a);
  const double diag_scale = m.diagonal().cwiseAbs().minCoeff();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c) CHECK(std::abs(m(r, c)) < 1e-10 * diag_scale);
  CHECK(transmit_power(s.q, a) ==
        doctest::Approx(testutil::kDefaultPower).epsilon(1e-10));
  // With interference nulled, gamma_k = |m_kk|^2 / sigma^2.
  const SinrVector g = sinr(s.q, a, testutil::kDefaultNoise);
  for (int k = 0; k < 4; ++k)
    CHECK(g(k) == doctest::Approx(std::norm(m(k, k)) /
                                  testutil::kDefaultNoise)
                      .epsilon(1e-8));
}

TEST_CASE("K=1: MRT, ZF, and MMSE coincide") {
  const Setup s = make_setup(103, 1);
  const PowerVector p = equal_split(1, testutil::kDefaultPower);
  const BeamCoefficients am = mrt(s.q, p);
  const BeamCoefficients az = zf(s.q, p);
  const BeamCoefficients ar =
      mmse(s.q, testutil::kDefaultPower, testutil::kDefaultNoise, p);
  CHECK(std::abs(am.A(0, 0) - az.A(0, 0)) < 1e-14 * std::abs(am.A(0, 0)));
  CHECK(std::abs(am.A(0, 0) - ar.A(0, 0)) < 1e-14 * std::abs(am.A(0, 0)));
}

TEST_CASE("ZF refuses a rank-deficient Gram matrix") {
  Scenario sc = testutil::default_scenario(104, 1);
  sc.users.push_back(sc.users[0]);
  const QuadratureGrid grid = build_grid(sc.aperture, 20, 20);
  const CorrelationMatrix q = correlation_matrix(grid, sample_channel(grid, sc));
  CHECK_THROWS_AS((void)zf(q, equal_split(2, 1e-3)), std::runtime_error);
}

TEST_CASE("MMSE interpolates between MRT and ZF") {
  const Setup s = make_setup(105, 4);
  const PowerVector p = equal_split(4, testutil::kDefaultPower);
  const BeamCoefficients am = mrt(s.q, p);
  const BeamCoefficients az = zf(s.q, p);

  // Huge noise: directions collapse to MRT.
  const BeamCoefficients high =
      mmse(s.q, testutil::kDefaultPower, 1e12, p);
  // Tiny noise: directions collapse to ZF.
  const BeamCoefficients low =
      mmse(s.q, testutil::kDefaultPower, 1e-12, p);
  for (int k = 0; k < 4; ++k) {
    CHECK(column_angle(high.A.col(k), am.A.col(k)) < 1e-6);
    CHECK(column_angle(low.A.col(k), az.A.col(k)) < 1e-6);
  }

  // Angles shrink monotonically over a noise sweep.
  double prev_mrt = -1.0;
  double prev_zf = 1e9;
  for (double n2 : {1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
    const BeamCoefficients a = mmse(s.q, testutil::kDefaultPower, n2, p);
    const double to_mrt = column_angle(a.A.col(0), am.A.col(0));
    const double to_zf = column_angle(a.A.col(0), az.A.col(0));
    if (prev_mrt >= 0.0) {
      CHECK(to_mrt <= prev_mrt + 1e-12);
      CHECK(to_zf >= prev_zf - 1e-12);
    }
    prev_mrt = to_mrt;
    prev_zf = to_zf;
  }
}

TEST_CASE("MMSE column beats 1000 random competitors on SLNR") {
  const Setup s = make_setup(106, 4);
  const PowerVector p = equal_split(4, testutil::kDefaultPower);
  const BeamCoefficients a =
      mmse(s.q, testutil::kDefaultPower, testutil::kDefaultNoise, p);
  const Eigen::VectorXd base = slnr(s.q, a, testutil::kDefaultNoise);
  std::mt19937_64 rng(1066);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 1000; ++trial) {
    BeamCoefficients b = a;
    const int k = trial % 4;
    Eigen::VectorXcd col(4);
    for (int i = 0; i < 4; ++i) col(i) = cxd(gauss(rng), gauss(rng));
    // Match the radiated power of user k's beam.
    const double pw = (col.adjoint() * s.q.Q * col)(0).real();
    b.A.col(k) = col * std::sqrt(p(k) / pw);
    const Eigen::VectorXd challenger = slnr(s.q, b, testutil::kDefaultNoise);
    CHECK(challenger(k) <= base(k) * (1.0 + 1e-9));
  }
}

TEST_CASE("optimal structure: lambda = 0 gives the MRT structure") {
  const Setup s = make_setup(107, 3);
  const PowerVector p = equal_split(3, testutil::kDefaultPower);
  const BeamCoefficients a = optimal_structure(
      s.q, LambdaVector::Zero(3), p, testutil::kDefaultNoise);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      const double expect = (i == k) ? std::sqrt(p(k)) : 0.0;
      CHECK(std::abs(a.A(i, k) - expect) < 1e-14);
    }
  }
}

TEST_CASE("optimal structure: uniform lambda matches MMSE directions") {
  const Setup s = make_setup(108, 4);
  const PowerVector p = equal_split(4, testutil::kDefaultPower);
  const BeamCoefficients a = optimal_structure(
      s.q, LambdaVector::Constant(4, testutil::kDefaultPower / 4.0), p,
      testutil::kDefaultNoise);
  const BeamCoefficients r =
      mmse(s.q, testutil::kDefaultPower, testutil::kDefaultNoise, p);
  for (int k = 0; k < 4; ++k)
    CHECK(column_angle(a.A.col(k), r.A.col(k)) < 1e-10);
}

TEST_CASE("Woodbury form of the span-coordinate inverse") {
  const Setup s = make_setup(109, 4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2e-3);
  LambdaVector lam(4);
  for (int k = 0; k < 4; ++k) lam(k) = u(rng);
  const Eigen::MatrixXcd core =
      Eigen::MatrixXcd::Identity(4, 4) +
      lam.asDiagonal().toDenseMatrix().cast<cxd>() * s.q.Q /
          testutil::kDefaultNoise;
  const Eigen::MatrixXcd d = core.inverse();
  const Eigen::MatrixXcd woodbury =
      Eigen::MatrixXcd::Identity(4, 4) -
      d * (lam.asDiagonal().toDenseMatrix().cast<cxd>() * s.q.Q /
           testutil::kDefaultNoise);
  CHECK((woodbury - d).cwiseAbs().maxCoeff() < 1e-12 * d.cwiseAbs().maxCoeff());
}

TEST_CASE("operator inverse: rho = 0 is the identity") {
  const Setup s = make_setup(110, 2, 12);
  CHECK(verify_operator_inverse(s.q, Eigen::VectorXd::Zero(2), s.cs, s.grid) ==
        doctest::Approx(0.0));
}

TEST_CASE("operator inverse: K=1 closed form") {
  const Setup s = make_setup(111, 1, 20);
  // Scale rho so rho*q is O(1); d = 1/(1 + rho q) by hand.
  Eigen::VectorXd rho(1);
  rho << 1.0 / s.q.Q(0, 0).real();
  CHECK(verify_operator_inverse(s.q, rho, s.cs, s.grid) < 1e-10);
}

TEST_CASE("operator inverse: random rho, four users") {
  const Setup s = make_setup(112, 4, 20);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd rho(4);
  for (int k = 0; k < 4; ++k) rho(k) = u(rng) / s.q.Q(k, k).real();
  CHECK(verify_operator_inverse(s.q, rho, s.cs, s.grid) < 1e-8);
}
