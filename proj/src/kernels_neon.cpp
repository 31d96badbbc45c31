// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/kernels.hpp"

#if defined(CAPA_HAVE_NEON)

#include <arm_neon.h>

namespace capa::kernels::detail {

cxd weighted_sum_neon(const double* w, const cxd* v, std::size_t n) {
  const double* vd = reinterpret_cast<const double*>(v);
  float64x2_t acc = vdupq_n_f64(0.0);  // [re, im]
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    acc = vfmaq_n_f64(acc, vld1q_f64(vd + 2 * j), w[j]);
    acc = vfmaq_n_f64(acc, vld1q_f64(vd + 2 * j + 2), w[j + 1]);
  }
  double re = vgetq_lane_f64(acc, 0);
  double im = vgetq_lane_f64(acc, 1);
  for (; j < n; ++j) {
    re += w[j] * v[j].real();
    im += w[j] * v[j].imag();
  }
  return {re, im};
}

cxd weighted_dot_neon(const double* w, const cxd* f, const cxd* g,
                      std::size_t n) {
  const double* fd = reinterpret_cast<const double*>(f);
  const double* gd = reinterpret_cast<const double*>(g);
  const float64x2_t sgn = {1.0, -1.0};
  float64x2_t racc = vdupq_n_f64(0.0);
  float64x2_t iacc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j < n; ++j) {
    const float64x2_t fv = vld1q_f64(fd + 2 * j);
    const float64x2_t gv = vld1q_f64(gd + 2 * j);
    const float64x2_t wf = vmulq_n_f64(fv, w[j]);
    // re += w*(fr*gr + fi*gi)
    racc = vfmaq_f64(racc, wf, gv);
    // im += w*(fr*gi - fi*gr)
    iacc = vfmaq_f64(iacc, wf, vmulq_f64(vextq_f64(gv, gv, 1), sgn));
  }
  const double re = vaddvq_f64(racc);
  const double im = vaddvq_f64(iacc);
  return {re, im};
}

}  // namespace capa::kernels::detail

#endif  // CAPA_HAVE_NEON
