#include <doctest.h>

#include <cmath>
#include <complex>

#include "support.hpp"
#include "wsc/normality.hpp"

using namespace wsc;
using testing_support::bundled;

namespace {

// Durand-Kerner roots of a polynomial with double coefficients (low-to-high).
std::vector<std::complex<double>> roots(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const std::size_t n = c.size() - 1;
  for (double& v : c) v /= c.back();
  std::vector<std::complex<double>> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::pow(std::complex<double>(0.4, 0.9), static_cast<double>(k));
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> p = 0.0, d = 1.0;
      for (std::size_t j = n + 1; j-- > 0;) p = p * z[k] + c[j];
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) d *= z[k] - z[j];
      z[k] -= p / d;
    }
  }
  return z;
}

}  // namespace

TEST_CASE("Schur-Cohn counts agree with numerical roots") {
  std::mt19937_64 g(31);
  std::uniform_int_distribution<int> coef(-6, 6), deg(1, 5);
  const std::vector<mpq_class> radii{mpq_class(1), mpq_class(1, 2), mpq_class(3, 2)};
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = deg(g);
    QPoly p(static_cast<std::size_t>(n + 1));
    std::vector<double> pd(p.size());
    for (int k = 0; k <= n; ++k) p[static_cast<std::size_t>(k)] = coef(g);
    if (p.back() == 0) p.back() = 1;
    for (std::size_t k = 0; k < p.size(); ++k) pd[k] = p[k].get_d();
    const auto z = roots(pd);
    for (const mpq_class& R : radii) {
      const double r = R.get_d();
      bool near = false;
      int inside = 0;
      for (const auto& v : z) {
        near = near || std::fabs(std::abs(v) - r) < 1e-6;
        inside += std::abs(v) < r ? 1 : 0;
      }
      if (near) continue;
      auto count = schur_cohn_count(p, R);
      // singular case without roots near the circle: a nearby radius counts the same roots
      if (!count) count = schur_cohn_count(p, R * (1 + mpq_class(1, 1 << 30)));
      REQUIRE(count.has_value());
      CHECK(*count == inside);
      ++compared;
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("Pisot classification") {
  CHECK(check_pisot(Base::of_integer(2)).pisot);
  CHECK(check_pisot(Base::parse("poly:-1,-1,1@1,2")).pisot);      // golden ratio
  CHECK(check_pisot(Base::parse("poly:-1,-1,0,1@1,2")).pisot);    // plastic number
  CHECK(check_pisot(Base::parse("poly:-1,-1,-1,1@1,2")).pisot);   // tribonacci
  CHECK_FALSE(check_pisot(Base::parse("poly:-2,0,1@1,2")).pisot); // sqrt 2
  CHECK_THROWS_AS(Base::parse("1"), NormalityError);
  CHECK_THROWS_AS(Base::parse("poly:-1,-1,2@1,2"), NormalityError);  // not monic
}

TEST_CASE("irrationality hypothesis") {
  const HypothesisReport d4 = hypothesis_check(bundled("dyadic").system, Base::of_integer(4));
  CHECK_FALSE(d4.holds());
  REQUIRE(d4.ratios.size() == 1);
  CHECK(d4.ratios[0].relation_found);
  CHECK(d4.ratios[0].p * 1 == -2 * d4.ratios[0].q);
  CHECK(hypothesis_check(bundled("dyadic").system, Base::of_integer(3)).holds());
  CHECK(hypothesis_check(bundled("golden_bc").system, Base::of_integer(2)).holds());
  // rho = 1/phi and s = phi: log s / log rho = -1
  const HypothesisReport gp = hypothesis_check(bundled("golden_bc").system, Base::parse("poly:-1,-1,1@1,2"));
  CHECK_FALSE(gp.irrational_ok());
}

TEST_CASE("Weyl sums of degenerate and uniform orbits") {
  const std::vector<int> Ks{256, 1024, 4096};
  // x = 0: every u_k = 0, so |W| = 1
  const auto zero = fractional_orbit(mpz_class(0), 2, 4096 + 64, 4096);
  const NormalityReport z = weyl_from_orbits({zero}, Ks, 4);
  for (const auto& row : z.weyl) CHECK(row.mean_abs == doctest::Approx(1.0));
  // a single term has modulus 1
  const NormalityReport one = weyl_from_orbits({{0.3}}, {1}, 3);
  for (const auto& row : one.weyl) CHECK(row.mean_abs == doctest::Approx(1.0));

  // Lebesgue-uniform x: mean |W_K| scales like K^-1/2 within a factor 3
  std::mt19937_64 g(41);
  std::vector<std::vector<double>> orbits;
  const long Q = 4096 + 64;
  for (int s = 0; s < 64; ++s) {
    mpz_class X(0);
    for (long b = 0; b < Q; b += 64) X = (X << 64) + mpz_class(std::to_string(g()));
    X >>= (Q + 63) / 64 * 64 - Q;
    orbits.push_back(fractional_orbit(X, 2, Q, 4096));
  }
  const NormalityReport u = weyl_from_orbits(orbits, Ks, 4);
  for (const auto& row : u.weyl) {
    CHECK(row.mean_abs <= 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(row.K));
    CHECK(row.mean_abs <= 3.0 * scale);
    CHECK(row.mean_abs >= scale / 3.0);
  }
}

TEST_CASE("fractional orbit doubling map") {
  // x = 5/16 in base 2 with Q = 8 digits: X = 80
  const auto u = fractional_orbit(mpz_class(80), 2, 8, 4);
  CHECK(u[0] == doctest::Approx(5.0 / 16));
  CHECK(u[1] == doctest::Approx(5.0 / 8));
  CHECK(u[2] == doctest::Approx(1.0 / 4));
  CHECK(u[3] == doctest::Approx(1.0 / 2));
}

TEST_CASE("star discrepancy") {
  std::vector<double> mid;
  for (int k = 0; k < 100; ++k) mid.push_back((2 * k + 1) / 200.0);
  CHECK(star_discrepancy(mid) == doctest::Approx(1.0 / 200));
  CHECK(star_discrepancy({0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("golden Bernoulli convolution, base 2: Weyl sums decay") {
  WeylOptions o;
  o.samples = 16;
  o.horizons = {64, 256, 1024};
  o.seed = 3;
  const NormalityReport r = weyl_sums(bundled("golden_bc").system, Base::of_integer(2), o);
  for (int m = 1; m <= 4; ++m) {
    CHECK(r.find(m, 1024)->mean_abs < r.find(m, 64)->mean_abs);
    CHECK(r.find(m, 1024)->mean_abs <= 1.0);
  }
  // discrepancy moves with the Weyl magnitudes
  CHECK(r.discrepancy.back().mean < r.discrepancy.front().mean);
  CHECK_THROWS_AS(weyl_sums(bundled("golden_bc").system, Base::parse("poly:-1,-1,1@1,2"), o), NormalityError);
}
