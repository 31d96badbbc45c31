// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_APERTURE_HPP
#define CAPA_APERTURE_HPP

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace capa {

using cxd = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Planar rectangular transmit aperture, centered at the origin in the
/// z = 0 plane, with extents lx and ly in meters.
struct Aperture {
  double lx = 0.0;
  double ly = 0.0;

  double area() const { return lx * ly; }
};

/// Tensor-product Gauss-Legendre rule over the aperture rectangle.
/// Nodes are 3D points on the z = 0 plane, weights carry the area Jacobian
/// and sum to lx*ly. Immutable after construction.
struct QuadratureGrid {
  Aperture aperture;
  int order_x = 0;
  int order_y = 0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// 1D Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Build an order_x-by-order_y tensor-product rule on the aperture.
/// Throws std::domain_error for non-positive extents or orders.
QuadratureGrid build_grid(const Aperture& aperture, int order_x, int order_y);

/// sum_j weight_j * samples_j, realizing the surface integral of a sampled
/// complex field. Throws std::domain_error on length mismatch.
cxd integrate(const QuadratureGrid& grid, std::span<const cxd> samples);

/// Quadrature approximation of the aperture inner product
/// \int f*(s) g(s) ds, conjugate-linear in the first argument.
cxd inner_product(const QuadratureGrid& grid, std::span<const cxd> f,
                  std::span<const cxd> g);

}  // namespace capa

#endif  // CAPA_APERTURE_HPP
