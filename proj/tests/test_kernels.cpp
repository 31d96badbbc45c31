// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "capa/kernels.hpp"

using namespace capa::kernels;

namespace {

struct BackendGuard {
  Backend saved = active_backend();
  ~BackendGuard() { set_backend(saved); }
};

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng);
  return w;
}

std::vector<cxd> random_complex(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cxd> v(n);
  for (auto& x : v) x = cxd(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("weighted_sum matches a naive loop") {
  std::mt19937_64 rng(7);
  const auto w = random_weights(rng, 401);
  const auto v = random_complex(rng, 401);
  cxd expect{};
  for (std::size_t j = 0; j < w.size(); ++j) expect += w[j] * v[j];
  const cxd got = weighted_sum(w, v);
  CHECK(std::abs(got - expect) < 1e-12 * std::abs(expect));
}

TEST_CASE("weighted_dot is conjugate-linear in the first argument") {
  std::mt19937_64 rng(8);
  const auto w = random_weights(rng, 128);
  const auto f = random_complex(rng, 128);
  const auto g = random_complex(rng, 128);
  const cxd fg = weighted_dot(w, f, g);
  const cxd gf = weighted_dot(w, g, f);
  CHECK(std::abs(fg - std::conj(gf)) < 1e-12 * std::abs(fg));
  const cxd ff = weighted_dot(w, f, f);
  CHECK(ff.real() > 0.0);
  CHECK(std::abs(ff.imag()) < 1e-12 * ff.real());
}

TEST_CASE("vector backends agree with the scalar reference") {
  BackendGuard guard;
  std::mt19937_64 rng(9);
  // Odd lengths exercise the tail loop.
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{8},
                        std::size_t{400}, std::size_t{1021}}) {
    const auto w = random_weights(rng, n);
    const auto f = random_complex(rng, n);
    const auto g = random_complex(rng, n);
    set_backend(Backend::scalar);
    const cxd sum_ref = weighted_sum(w, f);
    const cxd dot_ref = weighted_dot(w, f, g);
    for (Backend b : {Backend::avx2, Backend::neon}) {
      try {
        set_backend(b);
      } catch (const std::invalid_argument&) {
        continue;  // not available on this machine
      }
      const cxd sum_v = weighted_sum(w, f);
      const cxd dot_v = weighted_dot(w, f, g);
      INFO("backend ", backend_name(b), " n=", n);
      CHECK(std::abs(sum_v - sum_ref) <= 1e-12 * (1.0 + std::abs(sum_ref)));
      CHECK(std::abs(dot_v - dot_ref) <= 1e-12 * (1.0 + std::abs(dot_ref)));
    }
  }
}

TEST_CASE("length mismatch is rejected") {
  const std::vector<double> w(4, 1.0);
  const std::vector<cxd> v(3);
  CHECK_THROWS_AS((void)weighted_sum(w, v), std::invalid_argument);
  CHECK_THROWS_AS((void)weighted_dot(w, v, v), std::invalid_argument);
}
