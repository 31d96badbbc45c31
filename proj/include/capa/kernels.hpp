// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_KERNELS_HPP
#define CAPA_KERNELS_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string>

namespace capa::kernels {

using cxd = std::complex<double>;

/// Vectorized inner loops shared by all quadrature paths.
///
/// The reference implementation is scalar; AVX2 (x86-64) and NEON (aarch64)
/// variants are selected at runtime. The environment variable CAPA_KERNELS
/// ("scalar", "avx2", "neon") forces a backend and overrides auto-detection.
enum class Backend { scalar, avx2, neon };

/// Currently active backend.
Backend active_backend();

/// Force a backend. Throws std::invalid_argument if it is not available on
/// this machine.
void set_backend(Backend b);

/// Name of a backend ("scalar", "avx2", "neon").
std::string backend_name(Backend b);

/// sum_j w[j] * v[j]
cxd weighted_sum(std::span<const double> w, std::span<const cxd> v);

/// sum_j w[j] * conj(f[j]) * g[j]
cxd weighted_dot(std::span<const double> w, std::span<const cxd> f,
                 std::span<const cxd> g);

namespace detail {
cxd weighted_sum_scalar(const double* w, const cxd* v, std::size_t n);
cxd weighted_dot_scalar(const double* w, const cxd* f, const cxd* g,
                        std::size_t n);
#if defined(CAPA_HAVE_AVX2)
cxd weighted_sum_avx2(const double* w, const cxd* v, std::size_t n);
cxd weighted_dot_avx2(const double* w, const cxd* f, const cxd* g,
                      std::size_t n);
#endif
#if defined(CAPA_HAVE_NEON)
cxd weighted_sum_neon(const double* w, const cxd* v, std::size_t n);
cxd weighted_dot_neon(const double* w, const cxd* f, const cxd* g,
                      std::size_t n);
#endif
}  // namespace detail

}  // namespace capa::kernels

#endif  // CAPA_KERNELS_HPP
