// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace capa {

void CorrelationMatrix::validate() const {
  if (Q.rows() != Q.cols() || Q.rows() < 1)
    throw std::invalid_argument("correlation matrix: not square");
  const double scale = Q.norm();
  if ((Q - Q.adjoint()).norm() > 1e-12 * scale)
    throw std::invalid_argument("correlation matrix: not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Q,
                                                     Eigen::EigenvaluesOnly);
  const double max_ev = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * max_ev)
    throw std::invalid_argument("correlation matrix: not positive semidefinite");
}

CorrelationMatrix correlation_matrix(const QuadratureGrid& grid,
                                     const ChannelSamples& samples) {
  const int K = static_cast<int>(samples.h.cols());
  if (static_cast<std::size_t>(samples.h.rows()) != grid.size())
    throw std::invalid_argument("correlation_matrix: sample/grid mismatch");
  Eigen::MatrixXcd Q(K, K);
  for (int k = 0; k < K; ++k) {
    for (int i = k; i < K; ++i) {
      const cxd q = inner_product(
          grid, std::span<const cxd>(samples.h.col(k).data(), grid.size()),
          std::span<const cxd>(samples.h.col(i).data(), grid.size()));
      Q(k, i) = q;
      Q(i, k) = std::conj(q);
    }
  }
  // Kill residual quadrature asymmetry.
  Q = 0.5 * (Q + Q.adjoint()).eval();
  return CorrelationMatrix{std::move(Q)};
}

Eigen::MatrixXcd received_amplitudes(const CorrelationMatrix& Q,
                                     const BeamCoefficients& A) {
  if (Q.Q.cols() != A.A.rows())
    throw std::invalid_argument("received_amplitudes: shape mismatch");
  return Q.Q * A.A;
}

SinrVector sinr(const CorrelationMatrix& Q, const BeamCoefficients& A,
                double noise_power) {
  if (!(noise_power > 0.0))
    throw std::invalid_argument("sinr: noise power must be positive");
  const Eigen::MatrixXcd M = received_amplitudes(Q, A);
  const int K = static_cast<int>(M.rows());
  SinrVector gamma(K);
  for (int k = 0; k < K; ++k) {
    double interference = 0.0;
    for (int i = 0; i < K; ++i)
      if (i != k) interference += std::norm(M(k, i));
    gamma(k) = std::norm(M(k, k)) / (interference + noise_power);
  }
  return gamma;
}

Eigen::VectorXd slnr(const CorrelationMatrix& Q, const BeamCoefficients& A,
                     double noise_power) {
  if (!(noise_power > 0.0))
    throw std::invalid_argument("slnr: noise power must be positive");
  const Eigen::MatrixXcd M = received_amplitudes(Q, A);
  const int K = static_cast<int>(M.rows());
  Eigen::VectorXd out(K);
  for (int k = 0; k < K; ++k) {
    double leakage = 0.0;
    for (int i = 0; i < K; ++i)
      if (i != k) leakage += std::norm(M(i, k));
    out(k) = std::norm(M(k, k)) / (leakage + noise_power);
  }
  return out;
}

double transmit_power(const CorrelationMatrix& Q, const BeamCoefficients& A) {
  double p = 0.0;
  for (Eigen::Index k = 0; k < A.A.cols(); ++k)
    p += std::real(cxd(A.A.col(k).adjoint() * Q.Q * A.A.col(k)));
  return p;
}

double sum_rate(const SinrVector& gamma) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    r += std::log2(1.0 + gamma(k));
  return r;
}

double average_rate(const SinrVector& gamma) {
  return sum_rate(gamma) / static_cast<double>(gamma.size());
}

double beamforming_gain_capa(const CorrelationMatrix& Q) {
  return Q.Q.real().trace() / static_cast<double>(Q.num_users());
}

double beamforming_gain_spda(const Eigen::MatrixXcd& H) {
  return H.squaredNorm() / static_cast<double>(H.cols());
}

double multiplexing_gain_estimate(
    const std::function<double(double)>& rate_at_power, double power_lo,
    double power_hi) {
  if (!(power_hi > power_lo) || !(power_lo > 0.0))
    throw std::invalid_argument("multiplexing_gain_estimate: bad power bracket");
  const double r_lo = rate_at_power(power_lo);
  const double r_hi = rate_at_power(power_hi);
  if (!std::isfinite(r_lo) || !std::isfinite(r_hi))
    throw std::runtime_error("multiplexing_gain_estimate: non-finite rate");
  return (r_hi - r_lo) / (std::log2(power_hi) - std::log2(power_lo));
}

}  // namespace capa
