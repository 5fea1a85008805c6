#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "wsc/certificate_io.hpp"
#include "wsc/neighbourhood.hpp"

using namespace wsc;
using testing_support::bundled;
using testing_support::random_word;

namespace {

template <class F>
void each_word(int alphabet, int n, F&& f) {
  Word w(static_cast<std::size_t>(n), 0);
  for (;;) {
    f(w);
    int pos = n - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] + 1 == alphabet) w[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) return;
    ++w[static_cast<std::size_t>(pos)];
  }
}

struct Pipeline {
  AutomatonReport report;
  Word a0;
  NeighbourhoodSystem n0;
  B0Certificate cert;
};

const Pipeline& pipeline(const std::string& name) {
  static std::map<std::string, Pipeline> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const IFS& ifs = bundled(name).system;
  Automaton aut(ifs);
  Pipeline p;
  p.report = aut.explore(10000, 400);
  p.a0 = find_a0(p.report);
  p.n0 = neighbourhood_system(ifs, p.a0);
  p.cert = construct_b0(ifs, p.a0, p.n0);
  return cache.emplace(name, std::move(p)).first->second;
}

}  // namespace

TEST_CASE("small neighbourhood systems") {
  const IFS& d = bundled("dyadic").system;
  const NeighbourhoodSystem n1 = neighbourhood_system(d, parse_word("1", 2));
  CHECK(n1.contains_identity());
  CHECK(n1 == brute_force_weighted(d, parse_word("1", 2)).base);
  const IFS& s = bundled("strong_separation").system;
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Word a = random_word(g, 2, 8);
    const NeighbourhoodSystem n = neighbourhood_system(s, a);
    CHECK(n.size() == 1);
    CHECK(n.maps[0].is_identity());
  }
}

TEST_CASE("exact overlap collapses in N(122)") {
  const IFS& ifs = bundled("golden_bc").system;
  const Word a = parse_word("1,2,2", 2);
  const WeightedSystem ws = neighbourhood_weighted(ifs, a);
  const int id = ws.base.index_of(Similarity::identity(ifs.field(), 1));
  REQUIRE(id >= 0);
  // p1 p2 p2 + p2 p1 p1
  CHECK(ws.weights[static_cast<std::size_t>(id)] == mpq_class(1, 4));
  int identities = 0;
  for (const auto& m : ws.base.maps) identities += m.is_identity() ? 1 : 0;
  CHECK(identities == 1);
}

TEST_CASE("transition steps agree with direct enumeration") {
  for (const auto& [name, depth] : std::vector<std::pair<std::string, int>>{{"strong_separation", 6}, {"dyadic", 6}, {"golden_bc", 8}}) {
    const IFS& ifs = bundled(name).system;
    Automaton aut(ifs);
    for (int n = 1; n <= depth; ++n)
      each_word(2, n, [&](const Word& w) { CHECK(aut.state(aut.walk(w)) == neighbourhood_system(ifs, w)); });
  }
}

TEST_CASE("neighbourhood_system is independent of enumeration order") {
  // brute force enumerates differently (ratio window, no prefix merging)
  std::mt19937_64 g(8);
  const IFS& ifs = bundled("golden_bc").system;
  for (int trial = 0; trial < 40; ++trial) {
    const Word a = random_word(g, 2, 9);
    if (a.empty()) continue;
    NeighbourhoodSystem shuffled = neighbourhood_system(ifs, a);
    std::shuffle(shuffled.maps.begin(), shuffled.maps.end(), g);
    std::sort(shuffled.maps.begin(), shuffled.maps.end(), [](const auto& x, const auto& y) { return canonical_compare(x, y) < 0; });
    CHECK(shuffled == brute_force_weighted(ifs, a).base);
  }
}

TEST_CASE("automaton closure and maximal cardinality") {
  CHECK(pipeline("strong_separation").report.closed);
  CHECK(pipeline("strong_separation").report.states.size() == 1);
  CHECK(pipeline("dyadic").report.closed);
  CHECK(pipeline("golden_bc").report.closed);
  for (const auto& [name, len] : std::vector<std::pair<std::string, int>>{{"dyadic", 8}, {"golden_bc", 8}}) {
    const IFS& ifs = bundled(name).system;
    int best = 0, first_len = 0;
    for (int n = 1; n <= len; ++n)
      each_word(2, n, [&](const Word& w) {
        const int c = brute_force_weighted(ifs, w).base.size();
        if (c > best) best = c, first_len = n;
      });
    const Pipeline& p = pipeline(name);
    CHECK(p.report.max_cardinality == best);
    // a0 attains the maximum at its first occurrence depth
    CHECK(static_cast<int>(p.a0.size()) == first_len);
    CHECK(p.n0.size() == best);
  }
  CHECK(pipeline("strong_separation").a0 == parse_word("1", 2));
}

TEST_CASE("find_a0 refuses an open report") {
  Automaton aut(bundled("golden_bc").system);
  const AutomatonReport r = aut.explore(3, 400);
  CHECK_FALSE(r.closed);
  CHECK_THROWS(find_a0(r));
}

TEST_CASE("maximal system is stable under random prefixes") {
  for (const char* name : {"strong_separation", "dyadic", "golden_bc"}) {
    const Pipeline& p = pipeline(name);
    const LemmaMaximalReport r = verify_lemma_maximal(bundled(name).system, p.a0, p.n0, 100, 99);
    CHECK(r.ok());
    CHECK(r.passed == 100);
  }
}

TEST_CASE("weights DP equals brute force") {
  for (const char* name : {"dyadic", "golden_bc"}) {
    const IFS& ifs = bundled(name).system;
    Automaton aut(ifs);
    for (int n = 1; n <= 7; ++n)
      each_word(2, n, [&](const Word& w) {
        const WeightedSystem dp = aut.weights(w), bf = brute_force_weighted(ifs, w);
        CHECK(dp.base == bf.base);
        CHECK(dp.weights == bf.weights);
        mpq_class t(0);
        for (const auto& v : dp.normalized()) t += v;
        CHECK(t == 1);
      });
  }
}

TEST_CASE("b0 certificates recheck and give positive constants") {
  for (const char* name : {"strong_separation", "dyadic", "golden_bc"}) {
    const Pipeline& p = pipeline(name);
    const IFS& ifs = bundled(name).system;
    REQUIRE(p.cert.complete);
    CHECK(recheck_certificate(ifs, p.cert).ok());
    const ZetaCoefficients z = compute_zeta_coefficients(ifs, p.cert);
    for (const auto& c : z.c_h) CHECK(c > 0);
    for (std::size_t h = 0; h < z.coef.size(); ++h) CHECK(z.c_h[h] == *std::min_element(z.coef[h].begin(), z.coef[h].end()));
  }
  const Pipeline& s = pipeline("strong_separation");
  CHECK(s.cert.family.size() == 1);
  const ZetaCoefficients zs = compute_zeta_coefficients(bundled("strong_separation").system, s.cert);
  // the single coefficient is p_{b_Id}
  CHECK(zs.c_h[0] == bundled("strong_separation").system.word_prob(s.cert.b_h[0]));
}

TEST_CASE("zeta mixture weights are proportional to the ratio identity") {
  for (const char* name : {"dyadic", "golden_bc"}) {
    const IFS& ifs = bundled(name).system;
    const Pipeline& p = pipeline(name);
    const ZetaCoefficients z = compute_zeta_coefficients(ifs, p.cert);
    Automaton aut(ifs);
    std::mt19937_64 g(12);
    for (int trial = 0; trial < 10; ++trial) {
      Word w = random_word(g, 2, 10);
      w.insert(w.end(), p.cert.a0.begin(), p.cert.a0.end());
      w.insert(w.end(), p.cert.b0.begin(), p.cert.b0.end());
      const auto q = zeta_mixture_raw(aut, p.cert, w);
      mpq_class tq(0);
      for (const auto& v : q) tq += v;
      REQUIRE(tq > 0);
      const WeightedSystem ws = aut.weights(w);
      const mpq_class tw = ws.total();
      for (std::size_t f = 0; f < ws.weights.size(); ++f) {
        mpq_class lam(0);
        for (std::size_t h = 0; h < q.size(); ++h) lam += q[h] / tq * z.coef[h][f];
        mpq_class tl(0);
        for (std::size_t ff = 0; ff < ws.weights.size(); ++ff)
          for (std::size_t h = 0; h < q.size(); ++h) tl += q[h] / tq * z.coef[h][ff];
        CHECK(ws.weights[f] / tw == lam / tl);
      }
    }
  }
}

TEST_CASE("certificate text round trip") {
  const IFS& ifs = bundled("golden_bc").system;
  const Pipeline& p = pipeline("golden_bc");
  const std::string text = format_certificate("golden_bc", p.cert);
  const B0Certificate back = parse_certificate(text, ifs);
  CHECK(back.a0 == p.cert.a0);
  CHECK(back.b0 == p.cert.b0);
  CHECK(back.family == p.cert.family);
  CHECK(back.b_h == p.cert.b_h);
  CHECK(recheck_certificate(ifs, back).ok());
  std::string bad = text;
  bad.replace(bad.find("member: 0 ratio=[1 0]"), 21, "member: 0 ratio=[1 1]");
  CHECK_THROWS(parse_certificate(bad, ifs));
}
