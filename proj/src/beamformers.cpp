// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/beamformers.hpp"

#include <cmath>
#include <stdexcept>

namespace capa {

namespace {

// Scale column k of Phi so that phi_k^H Q phi_k = 1, then multiply by
// sqrt(p_k). Makes p_k the exact radiated power of user k's beam.
BeamCoefficients normalize_and_scale(const Eigen::MatrixXcd& Phi,
                                     const Eigen::MatrixXcd& Q,
                                     const PowerVector& p) {
  const int K = static_cast<int>(Phi.cols());
  if (p.size() != K)
    throw std::invalid_argument("beamformer: power vector size mismatch");
  Eigen::MatrixXcd A(Phi.rows(), K);
  for (int k = 0; k < K; ++k) {
    if (p(k) < 0.0)
      throw std::invalid_argument("beamformer: negative per-user power");
    const double unit = std::real(cxd(Phi.col(k).adjoint() * Q * Phi.col(k)));
    if (!(unit > 0.0))
      throw std::runtime_error("beamformer: degenerate channel direction");
    A.col(k) = Phi.col(k) * std::sqrt(p(k) / unit);
  }
  return BeamCoefficients{std::move(A)};
}

}  // namespace

BeamCoefficients mrt(const CorrelationMatrix& Q, const PowerVector& p) {
  const int K = Q.num_users();
  return normalize_and_scale(Eigen::MatrixXcd::Identity(K, K), Q.Q, p);
}

BeamCoefficients zf(const CorrelationMatrix& Q, const PowerVector& p,
                    double condition_cap) {
  const int K = Q.num_users();
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Q.Q);
  const double cond =
      svd.singularValues()(0) / svd.singularValues()(K - 1);
  if (!std::isfinite(cond) || cond > condition_cap)
    throw std::runtime_error(
        "zf: channel Gram matrix is ill-conditioned (condition number " +
        std::to_string(cond) + " exceeds cap " +
        std::to_string(condition_cap) + ")");
  const Eigen::MatrixXcd Phi =
      Q.Q.ldlt().solve(Eigen::MatrixXcd::Identity(K, K));
  return normalize_and_scale(Phi, Q.Q, p);
}

BeamCoefficients mmse(const CorrelationMatrix& Q, double total_power,
                      double noise_power, const PowerVector& p) {
  if (!(total_power > 0.0) || !(noise_power > 0.0))
    throw std::invalid_argument("mmse: powers must be positive");
  const int K = Q.num_users();
  const Eigen::MatrixXcd reg =
      Eigen::MatrixXcd::Identity(K, K) +
      (total_power / (K * noise_power)) * Q.Q;
  const Eigen::MatrixXcd Phi =
      reg.partialPivLu().solve(Eigen::MatrixXcd::Identity(K, K));
  return normalize_and_scale(Phi, Q.Q, p);
}

BeamCoefficients optimal_structure(const CorrelationMatrix& Q,
                                   const LambdaVector& lambda,
                                   const PowerVector& p, double noise_power) {
  const int K = Q.num_users();
  if (lambda.size() != K || p.size() != K)
    throw std::invalid_argument("optimal_structure: size mismatch");
  if (lambda.minCoeff() < 0.0 || p.minCoeff() < 0.0)
    throw std::invalid_argument("optimal_structure: negative parameter");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("optimal_structure: noise power must be positive");
  const Eigen::MatrixXcd sys =
      Eigen::MatrixXcd::Identity(K, K) +
      (lambda.cast<cxd>().asDiagonal() * Q.Q) / noise_power;
  Eigen::MatrixXcd A = sys.partialPivLu().solve(
      Eigen::MatrixXcd(p.array().sqrt().matrix().cast<cxd>().asDiagonal()));
  return BeamCoefficients{std::move(A)};
}

double verify_operator_inverse(const CorrelationMatrix& Q,
                               const Eigen::VectorXd& rho,
                               const ChannelSamples& samples,
                               const QuadratureGrid& grid) {
  const int K = Q.num_users();
  if (rho.size() != K)
    throw std::invalid_argument("verify_operator_inverse: rho size mismatch");
  if (rho.minCoeff() < 0.0)
    throw std::invalid_argument("verify_operator_inverse: negative rho");

  // In span coordinates, G maps H c to H (I + Lambda Q) c and the inverse
  // maps H c to H (I - D Lambda Q) c with D = (I + Lambda Q)^{-1}. Working
  // through sampled fields exercises the node-wise evaluation path.
  const Eigen::MatrixXcd LQ = rho.cast<cxd>().asDiagonal() * Q.Q;
  const Eigen::MatrixXcd D =
      (Eigen::MatrixXcd::Identity(K, K) + LQ)
          .partialPivLu()
          .solve(Eigen::MatrixXcd::Identity(K, K));

  const auto n = grid.size();
  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd hk = samples.h.col(k);
    // g = G h_k evaluated at the nodes.
    Eigen::VectorXcd g = hk;
    for (int i = 0; i < K; ++i) {
      const cxd proj = inner_product(
          grid, std::span<const cxd>(samples.h.col(i).data(), n),
          std::span<const cxd>(hk.data(), n));
      g += rho(i) * proj * samples.h.col(i);
    }
    // r = G^{-1} g evaluated at the nodes.
    Eigen::VectorXcd proj_g(K);
    for (int i = 0; i < K; ++i)
      proj_g(i) = inner_product(
          grid, std::span<const cxd>(samples.h.col(i).data(), n),
          std::span<const cxd>(g.data(), n));
    Eigen::VectorXcd r = g;
    const Eigen::VectorXcd corr = D * (rho.cast<cxd>().asDiagonal() * proj_g);
    for (int m = 0; m < K; ++m) r -= corr(m) * samples.h.col(m);

    const double scale = hk.cwiseAbs().maxCoeff();
    const double dev = (r - hk).cwiseAbs().maxCoeff();
    worst = std::max(worst, dev / scale);
  }
  return worst;
}

}  // namespace capa
