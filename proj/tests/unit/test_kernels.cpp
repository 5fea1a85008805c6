#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wsc/kernels.hpp"

using namespace wsc;

namespace {

std::vector<double> random_vec(std::mt19937_64& g, std::size_t n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

double tol(double scale, std::size_t n) { return 1e-14 * scale * static_cast<double>(n + 1); }

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("avx2 not available; only the scalar path is exercised");
    return;
  }
  std::mt19937_64 g(17);
  // lengths around the vector width and its remainders
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 100u, 1023u, 4096u}) {
    const auto a = random_vec(g, n), b = random_vec(g, n), w = random_vec(g, n, 0, 1);
    CHECK(std::fabs(kernels::scalar::sum(a) - kernels::avx2::sum(a)) <= tol(1, n));
    CHECK(std::fabs(kernels::scalar::l1_distance(a, b) - kernels::avx2::l1_distance(a, b)) <= tol(2, n));

    auto x1 = a, x2 = a;
    kernels::scalar::affine(x1, 0.37, -0.2);
    kernels::avx2::affine(x2, 0.37, -0.2);
    CHECK(x1 == x2);  // no FMA: bitwise identical

    const double c[3] = {0.1, -0.2, 0.05};
    for (double r : {0.0, 0.3, 0.9, 2.0}) {
      CHECK(kernels::scalar::ball_mass(a, {}, {}, w, c, r) == doctest::Approx(kernels::avx2::ball_mass(a, {}, {}, w, c, r)).epsilon(1e-12));
      CHECK(kernels::scalar::ball_mass(a, b, {}, w, c, r) == doctest::Approx(kernels::avx2::ball_mass(a, b, {}, w, c, r)).epsilon(1e-12));
      const auto z = random_vec(g, n);
      CHECK(kernels::scalar::ball_mass(a, b, z, w, c, r) == doctest::Approx(kernels::avx2::ball_mass(a, b, z, w, c, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ball_mass matches a direct count") {
  std::mt19937_64 g(4);
  const auto x = random_vec(g, 333), y = random_vec(g, 333), w = random_vec(g, 333, 0, 1);
  const double c[3] = {0.2, 0.1, 0.0};
  double expect = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if ((x[k] - c[0]) * (x[k] - c[0]) + (y[k] - c[1]) * (y[k] - c[1]) <= 0.25) expect += w[k];
  CHECK(kernels::scalar::ball_mass(x, y, {}, w, c, 0.5) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("dispatch honours forced backends") {
  const auto before = kernels::active_backend();
  kernels::force_backend(kernels::Backend::scalar);
  CHECK(kernels::active_backend() == kernels::Backend::scalar);
  kernels::force_backend(kernels::Backend::avx2);
  CHECK(kernels::active_backend() == (kernels::avx2_available() ? kernels::Backend::avx2 : kernels::Backend::scalar));
  kernels::force_backend(before);
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(kernels::sum(v) == 15.0);
}
