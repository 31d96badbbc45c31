// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace capa::kernels {

namespace {

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(CAPA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(CAPA_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

Backend detect_backend() {
  if (const char* env = std::getenv("CAPA_KERNELS")) {
    const std::string s(env);
    Backend b;
    if (s == "scalar")
      b = Backend::scalar;
    else if (s == "avx2")
      b = Backend::avx2;
    else if (s == "neon")
      b = Backend::neon;
    else
      throw std::invalid_argument("CAPA_KERNELS: unknown backend '" + s + "'");
    if (!backend_available(b))
      throw std::invalid_argument("CAPA_KERNELS: backend '" + s +
                                  "' not available on this machine");
    return b;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Backend& current() {
  static Backend b = detect_backend();
  return b;
}

}  // namespace

Backend active_backend() { return current(); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend '" + backend_name(b) +
                                "' not available on this machine");
  current() = b;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

cxd weighted_sum(std::span<const double> w, std::span<const cxd> v) {
  if (w.size() != v.size())
    throw std::invalid_argument("weighted_sum: length mismatch");
  switch (current()) {
#if defined(CAPA_HAVE_AVX2)
    case Backend::avx2:
      return detail::weighted_sum_avx2(w.data(), v.data(), w.size());
#endif
#if defined(CAPA_HAVE_NEON)
    case Backend::neon:
      return detail::weighted_sum_neon(w.data(), v.data(), w.size());
#endif
    default:
      return detail::weighted_sum_scalar(w.data(), v.data(), w.size());
  }
}

cxd weighted_dot(std::span<const double> w, std::span<const cxd> f,
                 std::span<const cxd> g) {
  if (w.size() != f.size() || w.size() != g.size())
    throw std::invalid_argument("weighted_dot: length mismatch");
  switch (current()) {
#if defined(CAPA_HAVE_AVX2)
    case Backend::avx2:
      return detail::weighted_dot_avx2(w.data(), f.data(), g.data(), w.size());
#endif
#if defined(CAPA_HAVE_NEON)
    case Backend::neon:
      return detail::weighted_dot_neon(w.data(), f.data(), g.data(), w.size());
#endif
    default:
      return detail::weighted_dot_scalar(w.data(), f.data(), g.data(),
                                         w.size());
  }
}

}  // namespace capa::kernels
