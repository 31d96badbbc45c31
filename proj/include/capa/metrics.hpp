// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_METRICS_HPP
#define CAPA_METRICS_HPP

#include <functional>

#include "capa/channel.hpp"

namespace capa {

/// K x K Hermitian channel Gram matrix. Every design and every metric in
/// this library is a function of Q (and beam coefficients) only; the
/// quadrature path exists to construct Q and to cross-validate against it.
struct CorrelationMatrix {
  Eigen::MatrixXcd Q;

  int num_users() const { return static_cast<int>(Q.rows()); }

  /// Asserts Hermitian symmetry and positive semidefiniteness; throws
  /// std::invalid_argument otherwise.
  void validate() const;
};

/// Coefficients A of continuous beamformers in the channel span:
/// w_k(s) = sum_i A(i, k) h_i(s), i.e. w(s) = h(s) A.
struct BeamCoefficients {
  Eigen::MatrixXcd A;
};

using SinrVector = Eigen::VectorXd;

/// q_{k,i} = <h_k, h_i> via quadrature, symmetrized with its adjoint.
CorrelationMatrix correlation_matrix(const QuadratureGrid& grid,
                                     const ChannelSamples& samples);

/// M = Q*A; entry (k, i) is the received amplitude \int h_k^*(s) w_i(s) ds.
Eigen::MatrixXcd received_amplitudes(const CorrelationMatrix& Q,
                                     const BeamCoefficients& A);

/// Per-user SINR from the received-amplitude matrix.
SinrVector sinr(const CorrelationMatrix& Q, const BeamCoefficients& A,
                double noise_power);

/// Per-user SLNR: desired power over leakage caused to other users plus
/// noise (column k of M in the denominator).
Eigen::VectorXd slnr(const CorrelationMatrix& Q, const BeamCoefficients& A,
                     double noise_power);

/// sum_k a_k^H Q a_k = sum_k \int |w_k(s)|^2 ds, in A^2.
double transmit_power(const CorrelationMatrix& Q, const BeamCoefficients& A);

double sum_rate(const SinrVector& gamma);
double average_rate(const SinrVector& gamma);

/// (1/K) sum_k \int |h_k(s)|^2 ds = (1/K) tr(Q).
double beamforming_gain_capa(const CorrelationMatrix& Q);

/// (1/K) sum_k ||h_k||^2 for a discrete channel matrix.
double beamforming_gain_spda(const Eigen::MatrixXcd& H);

/// Finite-difference slope of a rate curve against log2 of transmit power:
/// (R(P_hi) - R(P_lo)) / (log2 P_hi - log2 P_lo). rate_at_power runs the
/// design end-to-end at the given budget. Throws on non-finite rates.
double multiplexing_gain_estimate(
    const std::function<double(double)>& rate_at_power, double power_lo,
    double power_hi);

}  // namespace capa

#endif  // CAPA_METRICS_HPP
