// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_SPDA_HPP
#define CAPA_SPDA_HPP

#include "capa/optimizer.hpp"

namespace capa {

/// Discrete-array channel set: the stacked channel matrix H and its Gram
/// matrix H^H H, which plugs into every design and metric in place of Q.
struct SpdaChannelSet {
  Eigen::MatrixXcd H;       // N_d x K
  CorrelationMatrix gram;   // K x K
};

/// Exact H^H H, symmetrized.
CorrelationMatrix spda_gram(const Eigen::MatrixXcd& H);

SpdaChannelSet make_spda_channel_set(const SpdaArray& array,
                                     const Scenario& scenario);

struct SpdaOptimalResult {
  PolyblockResult inner;     // solved over the Gram matrix
  Eigen::MatrixXcd W;        // recovered discrete beamformer H * A
};

/// Globally optimal SPDA beamforming: the polyblock algorithm run with
/// Q := H^H H, beamformer recovered as W = H A.
SpdaOptimalResult spda_optimal(const Eigen::MatrixXcd& H, double noise_power,
                               double power_budget, const Utility& utility,
                               const OptimizerOptions& opt = {});

}  // namespace capa

#endif  // CAPA_SPDA_HPP
