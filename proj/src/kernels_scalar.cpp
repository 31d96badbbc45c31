// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/kernels.hpp"

namespace capa::kernels::detail {

cxd weighted_sum_scalar(const double* w, const cxd* v, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    re += w[j] * v[j].real();
    im += w[j] * v[j].imag();
  }
  return {re, im};
}

cxd weighted_dot_scalar(const double* w, const cxd* f, const cxd* g,
                        std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double fr = f[j].real(), fi = f[j].imag();
    const double gr = g[j].real(), gi = g[j].imag();
    re += w[j] * (fr * gr + fi * gi);
    im += w[j] * (fr * gi - fi * gr);
  }
  return {re, im};
}

}  // namespace capa::kernels::detail
