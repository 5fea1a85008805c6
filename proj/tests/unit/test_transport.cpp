#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wsc/transport.hpp"

using namespace wsc;

// For uniform masses of equal count an optimal plan is a permutation
// (Birkhoff), so brute force over permutations is an oracle.
TEST_CASE("transport equals the best assignment on uniform masses") {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> cost(static_cast<std::size_t>(n * n));
      for (auto& c : cost) c = u(g);
      std::vector<double> a(static_cast<std::size_t>(n), 1.0 / n);
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      double best = INFINITY;
      do {
        double s = 0;
        for (int i = 0; i < n; ++i) s += cost[static_cast<std::size_t>(i * n + perm[static_cast<std::size_t>(i)])];
        best = std::min(best, s / n);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(solve_transport(a, a, cost).cost == doctest::Approx(best).epsilon(1e-10));
    }
  }
}

TEST_CASE("transport on the line equals the CDF formula") {
  std::mt19937_64 g(29);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 7, m = 1 + trial % 5;
    std::vector<double> xa(static_cast<std::size_t>(n)), xb(static_cast<std::size_t>(m)), a(xa.size()), b(xb.size());
    for (auto& x : xa) x = u(g);
    for (auto& x : xb) x = u(g);
    for (auto& w : a) w = u(g) + 0.01;
    for (auto& w : b) w = u(g) + 0.01;
    const double ta = std::accumulate(a.begin(), a.end(), 0.0), tb = std::accumulate(b.begin(), b.end(), 0.0);
    for (auto& w : a) w /= ta;
    for (auto& w : b) w /= tb;
    std::vector<double> cost;
    for (double p : xa)
      for (double q : xb) cost.push_back(std::fabs(p - q));
    // W1 = integral |F_a - F_b| over a fine scan
    double w1 = 0.0;
    const int steps = 200000;
    for (int s = 0; s < steps; ++s) {
      const double x = (s + 0.5) / steps;
      double fa = 0, fb = 0;
      for (std::size_t k = 0; k < xa.size(); ++k) fa += xa[k] <= x ? a[k] : 0.0;
      for (std::size_t k = 0; k < xb.size(); ++k) fb += xb[k] <= x ? b[k] : 0.0;
      w1 += std::fabs(fa - fb) / steps;
    }
    const TransportResult r = solve_transport(a, b, cost);
    CHECK(r.cost == doctest::Approx(w1).epsilon(1e-4));
    // the plan is a coupling
    std::vector<double> ra(a.size()), cb(b.size());
    for (const auto& f : r.plan) ra[static_cast<std::size_t>(f.row)] += f.mass, cb[static_cast<std::size_t>(f.col)] += f.mass;
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(ra[k] == doctest::Approx(a[k]).epsilon(1e-9));
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(cb[k] == doctest::Approx(b[k]).epsilon(1e-9));
  }
}

TEST_CASE("transport rejects mismatched shapes") {
  const std::vector<double> a{0.5, 0.5}, b{1.0}, c{1.0};
  CHECK_THROWS(solve_transport(a, b, c));
}
