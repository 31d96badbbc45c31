// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/power_alloc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace capa {

PowerVector waterfill_sum_rate(const Eigen::VectorXd& effective_gains,
                               double noise_power, double total_power) {
  const int K = static_cast<int>(effective_gains.size());
  if (K < 1) throw std::invalid_argument("waterfill: empty gain vector");
  if (!(noise_power > 0.0) || !(total_power > 0.0))
    throw std::invalid_argument("waterfill: powers must be positive");
  if (effective_gains.maxCoeff() <= 0.0)
    throw std::invalid_argument("waterfill: all effective gains are zero");

  Eigen::VectorXd floor(K);  // sigma^2 / g_k, infinite for dead users
  for (int k = 0; k < K; ++k)
    floor(k) = effective_gains(k) > 0.0
                   ? noise_power / effective_gains(k)
                   : std::numeric_limits<double>::infinity();

  const auto allocated = [&](double mu) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += std::max(0.0, mu - floor(k));
    return s;
  };

  double lo = floor.minCoeff();
  double hi = lo + total_power;  // allocated(hi) >= total_power
  const double tol = 1e-12 * total_power;
  while (hi - lo > 1e-15 * hi) {
    const double mu = 0.5 * (lo + hi);
    const double s = allocated(mu);
    if (std::abs(s - total_power) <= tol) {
      lo = hi = mu;
      break;
    }
    (s < total_power ? lo : hi) = mu;
  }
  const double mu = 0.5 * (lo + hi);

  PowerVector p(K);
  for (int k = 0; k < K; ++k) p(k) = std::max(0.0, mu - floor(k));
  // Remove the last bisection epsilon so the budget holds exactly.
  const double s = p.sum();
  if (s > 0.0) p *= total_power / s;
  return p;
}

PowerVector equal_power(double total_power, int num_users) {
  if (num_users < 1) throw std::invalid_argument("equal_power: no users");
  if (!(total_power > 0.0))
    throw std::invalid_argument("equal_power: budget must be positive");
  return PowerVector::Constant(num_users, total_power / num_users);
}

Eigen::VectorXd effective_gains(const CorrelationMatrix& Q,
                                const BeamCoefficients& unit_directions) {
  const Eigen::MatrixXcd M = received_amplitudes(Q, unit_directions);
  Eigen::VectorXd g(M.rows());
  for (Eigen::Index k = 0; k < M.rows(); ++k) g(k) = std::norm(M(k, k));
  return g;
}

}  // namespace capa
