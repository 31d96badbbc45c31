// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/spda.hpp"

#include <stdexcept>

namespace capa {

CorrelationMatrix spda_gram(const Eigen::MatrixXcd& H) {
  if (H.rows() < 1 || H.cols() < 1)
    throw std::invalid_argument("spda_gram: empty channel matrix");
  if (!H.allFinite())
    throw std::invalid_argument("spda_gram: non-finite channel entry");
  Eigen::MatrixXcd G = H.adjoint() * H;
  G = 0.5 * (G + G.adjoint()).eval();
  return CorrelationMatrix{std::move(G)};
}

SpdaChannelSet make_spda_channel_set(const SpdaArray& array,
                                     const Scenario& scenario) {
  SpdaChannelSet set;
  set.H = spda_channels(array, scenario);
  set.gram = spda_gram(set.H);
  return set;
}

SpdaOptimalResult spda_optimal(const Eigen::MatrixXcd& H, double noise_power,
                               double power_budget, const Utility& utility,
                               const OptimizerOptions& opt) {
  SpdaOptimalResult res;
  res.inner =
      polyblock_maximize(spda_gram(H), noise_power, power_budget, utility, opt);
  res.W = H * res.inner.A.A;
  return res;
}

}  // namespace capa
