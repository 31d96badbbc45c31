// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_BEAMFORMERS_HPP
#define CAPA_BEAMFORMERS_HPP

#include "capa/metrics.hpp"

namespace capa {

/// Lagrange multipliers / virtual per-user powers, A^2. At the optimum of
/// the full-power problem they sum to the power budget.
using LambdaVector = Eigen::VectorXd;

/// Per-user allocated powers, A^2.
using PowerVector = Eigen::VectorXd;

/// Maximum condition number accepted when inverting Q for the ZF design.
inline constexpr double kDefaultZfConditionCap = 1e12;

/// Maximum-ratio transmission: each column aligned with its own channel,
/// normalized to unit radiated power and scaled by sqrt(p_k).
BeamCoefficients mrt(const CorrelationMatrix& Q, const PowerVector& p);

/// Zero-forcing: directions Q^{-1} e_k, normalized per column; the
/// received-amplitude matrix Q*A is diagonal. Throws std::runtime_error
/// naming the condition number when Q is ill-conditioned.
BeamCoefficients zf(const CorrelationMatrix& Q, const PowerVector& p,
                    double condition_cap = kDefaultZfConditionCap);

/// MMSE / regularized ZF: directions (I + P/(K sigma^2) Q)^{-1} e_k,
/// normalized per column.
BeamCoefficients mmse(const CorrelationMatrix& Q, double total_power,
                      double noise_power, const PowerVector& p);

/// The structured form A = (I + Lambda Q / sigma^2)^{-1} P^{1/2}. No column
/// normalization: here p carries the structural power-allocation meaning.
BeamCoefficients optimal_structure(const CorrelationMatrix& Q,
                                   const LambdaVector& lambda,
                                   const PowerVector& p, double noise_power);

/// Numerical check of the rank-K integral-operator inverse: applies
/// G = id + sum_i rho_i h_i <h_i, .> and then its closed-form inverse to
/// each sampled channel and returns the largest node-wise relative
/// deviation from the original field.
double verify_operator_inverse(const CorrelationMatrix& Q,
                               const Eigen::VectorXd& rho,
                               const ChannelSamples& samples,
                               const QuadratureGrid& grid);

}  // namespace capa

#endif  // CAPA_BEAMFORMERS_HPP
