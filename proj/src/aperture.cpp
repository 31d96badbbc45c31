// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/aperture.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "capa/kernels.hpp"

namespace capa {

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::domain_error("gauss_legendre: order must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

QuadratureGrid build_grid(const Aperture& aperture, int order_x, int order_y) {
  if (!(aperture.lx > 0.0) || !(aperture.ly > 0.0))
    throw std::domain_error("build_grid: aperture extents must be positive");
  if (order_x < 1 || order_y < 1)
    throw std::domain_error("build_grid: quadrature orders must be >= 1");

  std::vector<double> nx, wx, ny, wy;
  gauss_legendre(order_x, nx, wx);
  gauss_legendre(order_y, ny, wy);

  QuadratureGrid grid;
  grid.aperture = aperture;
  grid.order_x = order_x;
  grid.order_y = order_y;
  grid.nodes.reserve(static_cast<std::size_t>(order_x) * order_y);
  grid.weights.reserve(grid.nodes.capacity());

  const double jx = aperture.lx / 2.0;
  const double jy = aperture.ly / 2.0;
  for (int iy = 0; iy < order_y; ++iy) {
    for (int ix = 0; ix < order_x; ++ix) {
      grid.nodes.emplace_back(jx * nx[ix], jy * ny[iy], 0.0);
      grid.weights.push_back(jx * jy * wx[ix] * wy[iy]);
    }
  }
  return grid;
}

cxd integrate(const QuadratureGrid& grid, std::span<const cxd> samples) {
  if (samples.size() != grid.size())
    throw std::domain_error("integrate: sample count does not match grid");
  return kernels::weighted_sum(grid.weights, samples);
}

cxd inner_product(const QuadratureGrid& grid, std::span<const cxd> f,
                  std::span<const cxd> g) {
  if (f.size() != grid.size() || g.size() != grid.size())
    throw std::domain_error("inner_product: sample count does not match grid");
  return kernels::weighted_dot(grid.weights, f, g);
}

}  // namespace capa
