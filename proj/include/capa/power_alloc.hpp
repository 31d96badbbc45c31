// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_POWER_ALLOC_HPP
#define CAPA_POWER_ALLOC_HPP

#include "capa/beamformers.hpp"

namespace capa {

/// Water-filling for the sum-rate utility over interference-free effective
/// gains: p_k = max(0, mu - sigma^2/g_k) with the water level mu bisected
/// so the powers sum to the budget (tolerance 1e-12 * budget).
///
/// Exact for ZF directions; used as the (documented) heuristic allocation
/// for MRT and MMSE, whose allocation problem is interference-coupled.
PowerVector waterfill_sum_rate(const Eigen::VectorXd& effective_gains,
                               double noise_power, double total_power);

/// p_k = P/K for all k.
PowerVector equal_power(double total_power, int num_users);

/// Effective gains |[Q Phi]_{k,k}|^2 of unit-power beam directions; the
/// columns of A must already be normalized so this is what waterfilling
/// expects. Convenience used by the sweep harness.
Eigen::VectorXd effective_gains(const CorrelationMatrix& Q,
                                const BeamCoefficients& unit_directions);

}  // namespace capa

#endif  // CAPA_POWER_ALLOC_HPP
