// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/kernels.hpp"

#if defined(CAPA_HAVE_AVX2)

#include <immintrin.h>

namespace capa::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Duplicate weights [w0 w1 w2 w3] -> [w0 w0 w1 w1], [w2 w2 w3 w3].
inline void dup_weights(const double* w, __m256d& wlo, __m256d& whi) {
  const __m256d wv = _mm256_loadu_pd(w);
  wlo = _mm256_permute4x64_pd(wv, 0b01010000);
  whi = _mm256_permute4x64_pd(wv, 0b11111010);
}

}  // namespace

cxd weighted_sum_avx2(const double* w, const cxd* v, std::size_t n) {
  const double* vd = reinterpret_cast<const double*>(v);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d wlo, whi;
    dup_weights(w + j, wlo, whi);
    acc0 = _mm256_fmadd_pd(wlo, _mm256_loadu_pd(vd + 2 * j), acc0);
    acc1 = _mm256_fmadd_pd(whi, _mm256_loadu_pd(vd + 2 * j + 4), acc1);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  // acc0 lanes: [re im re im]
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; j < n; ++j) {
    re += w[j] * v[j].real();
    im += w[j] * v[j].imag();
  }
  return {re, im};
}

cxd weighted_dot_avx2(const double* w, const cxd* f, const cxd* g,
                      std::size_t n) {
  const double* fd = reinterpret_cast<const double*>(f);
  const double* gd = reinterpret_cast<const double*>(g);
  // Sign mask flips odd lanes: conj(f)*g imag part is fr*gi - fi*gr.
  const __m256d sgn = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  __m256d racc = _mm256_setzero_pd();
  __m256d iacc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d wlo, whi;
    dup_weights(w + j, wlo, whi);
    for (int half = 0; half < 2; ++half) {
      const __m256d wv = half == 0 ? wlo : whi;
      const __m256d fv = _mm256_loadu_pd(fd + 2 * j + 4 * half);
      const __m256d gv = _mm256_loadu_pd(gd + 2 * j + 4 * half);
      const __m256d wf = _mm256_mul_pd(wv, fv);
      racc = _mm256_fmadd_pd(wf, gv, racc);
      // swap re/im pairs of g, negate the (now) odd lanes holding gr
      const __m256d gsw = _mm256_xor_pd(_mm256_permute_pd(gv, 0b0101), sgn);
      iacc = _mm256_fmadd_pd(wf, gsw, iacc);
    }
  }
  double re = hsum(racc);
  double im = hsum(iacc);
  for (; j < n; ++j) {
    const double fr = f[j].real(), fi = f[j].imag();
    const double gr = g[j].real(), gi = g[j].imag();
    re += w[j] * (fr * gr + fi * gi);
    im += w[j] * (fr * gi - fi * gr);
  }
  return {re, im};
}

}  // namespace capa::kernels::detail

#endif  // CAPA_HAVE_AVX2
