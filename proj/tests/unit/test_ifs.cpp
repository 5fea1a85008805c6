#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "wsc/ifs.hpp"
#include "wsc/neighbourhood.hpp"

using namespace wsc;
using testing_support::bundled;
using testing_support::random_word;

namespace {

FieldElement q(const IFS& ifs, mpq_class v) { return FieldElement::rational(ifs.field(), v); }

}  // namespace

TEST_CASE("dyadic composition by hand") {
  const IFS& raw = bundled("dyadic").raw;
  const Similarity m = compose_word(raw, parse_word("1,1", 2));
  CHECK(m.ratio == q(raw, mpq_class(1, 4)));
  CHECK(m.translation[0].is_zero());
  CHECK(compose_word(raw, Word{}).is_identity());
  // phi_1^-1 phi_2 = x + 1 before normalization
  const Similarity r = relative_map(raw, parse_word("1", 2), parse_word("2", 2));
  CHECK(r.ratio == q(raw, 1));
  CHECK(r.translation[0] == q(raw, 1));
  // phi_2 phi_1 (0) = 1/2
  CHECK(project_point(raw, parse_word("2,1", 2))[0] == q(raw, mpq_class(1, 2)));
}

TEST_CASE("golden words 122 and 211 give one map") {
  for (const IFS* ifs : {&bundled("golden_bc").raw, &bundled("golden_bc").system}) {
    const Word a = parse_word("1,2,2", 2), b = parse_word("2,1,1", 2);
    CHECK(compose_word(*ifs, a) == compose_word(*ifs, b));
    CHECK(relative_map(*ifs, a, b).is_identity());
    CHECK(relative_map(*ifs, a, a).is_identity());
  }
}

TEST_CASE("normalization: origin fixed by phi_1, hull in the 3/4 ball") {
  for (const char* name : {"strong_separation", "dyadic", "golden_bc"}) {
    const IFS& ifs = bundled(name).system;
    CHECK(ifs.map(0).translation[0].is_zero());
    CHECK(ifs.hull().lo[0].is_zero());
    CHECK(ifs.hull().hi[0] == q(ifs, normalization_radius()));
    // idempotent up to exact equality
    const IFS again = normalize_ifs(ifs);
    for (int j = 0; j < ifs.size(); ++j) CHECK(again.map(j) == ifs.map(j));
    // conjugacy: normalization o raw = normalized o normalization
    const Similarity& c = ifs.normalization();
    for (int j = 0; j < ifs.size(); ++j) CHECK(c.compose(bundled(name).raw.map(j)) == ifs.map(j).compose(c));
  }
  const IFS& d = bundled("dyadic").system;
  CHECK(d.map(1).translation[0] == q(d, mpq_class(3, 8)));
  CHECK(bundled("golden_bc").system.hull_is_attractor());
  CHECK(bundled("dyadic").system.hull_is_attractor());
  CHECK_FALSE(bundled("strong_separation").system.hull_is_attractor());
}

TEST_CASE("normalized combinatorics do not depend on input coordinates") {
  std::mt19937_64 g(5);
  for (const char* name : {"dyadic", "golden_bc"}) {
    const auto& cfg = bundled(name);
    const IFS& raw = cfg.raw;
    // conjugate the raw system by S(x) = 3x + 7/2
    const Similarity S{q(raw, 3), {q(raw, mpq_class(7, 2))}};
    std::vector<Similarity> maps;
    for (const auto& m : raw.maps()) maps.push_back(S.compose(m).compose(S.inverse()));
    const IFS moved = normalize_ifs(IFS(raw.field(), 1, maps, raw.probs()));
    for (int j = 0; j < raw.size(); ++j) CHECK(moved.map(j) == cfg.system.map(j));
    for (int trial = 0; trial < 30; ++trial) {
      const Word a = random_word(g, 2, 7);
      if (a.empty()) continue;
      CHECK(neighbourhood_system(moved, a) == neighbourhood_system(cfg.system, a));
    }
  }
}

TEST_CASE("compose_word is a homomorphism") {
  std::mt19937_64 g(3);
  const IFS& ifs = bundled("golden_bc").system;
  for (int trial = 0; trial < 100; ++trial) {
    Word a = random_word(g, 2, 12), b = random_word(g, 2, 12);
    Word ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(compose_word(ifs, ab) == compose_word(ifs, a).compose(compose_word(ifs, b)));
    CHECK(compose_word(ifs, a).compose(relative_map(ifs, a, b)) == compose_word(ifs, b));
  }
}

TEST_CASE("attractor covers") {
  const IFS& d = bundled("dyadic").system;
  CHECK(attractor_cover(d, 0).size() == 1);
  const auto c1 = attractor_cover(d, 1);
  REQUIRE(c1.size() == 2);
  CHECK(c1[0].lo[0] == d.hull().lo[0]);
  CHECK(c1[1].hi[0] == d.hull().hi[0]);
  CHECK(c1[0].hi[0] == c1[1].lo[0]);  // tiling
  // nesting: each depth-5 box sits in its depth-4 parent
  const IFS& s = bundled("strong_separation").system;
  const auto c4 = attractor_cover(s, 4), c5 = attractor_cover(s, 5);
  for (std::size_t k = 0; k < c5.size(); ++k) CHECK(c4[k / 2].contains(c5[k]));
}

TEST_CASE("geometric predicates") {
  const IFS& d = bundled("dyadic").system;
  const Similarity b2 = compose_word(d, parse_word("2", 2));
  const Ball ball{b2.translation, b2.ratio};  // B_(2)
  CHECK(intersect_predicate(d, parse_word("1", 2), ball, 0) == Predicate::intersects);
  const Ball far{{q(d, 100)}, q(d, 1)};
  CHECK(intersect_predicate(d, parse_word("1", 2), far, 4) == Predicate::disjoint);
  // golden: the hull is the attractor, so depth 0 already decides
  const IFS& gb = bundled("golden_bc").system;
  const Ball u = Ball::unit(gb.field(), 1);
  CHECK(intersect_predicate(gb, Word{}, u, 0) == Predicate::intersects);
}

TEST_CASE("refinement never contradicts a disjoint verdict") {
  std::mt19937_64 g(9);
  const IFS& s = bundled("strong_separation").system;
  std::uniform_int_distribution<int> n(-40, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const Word b = random_word(g, 2, 3);
    const Ball ball{{q(s, mpq_class(n(g), 32))}, q(s, mpq_class(1 + std::abs(n(g)), 256))};
    const Predicate coarse = intersect_predicate(s, b, ball, 2);
    const Predicate fine = intersect_predicate(s, b, ball, 6);
    if (coarse == Predicate::disjoint) CHECK(fine != Predicate::intersects);
    if (coarse == Predicate::intersects) CHECK(fine != Predicate::disjoint);
  }
}

TEST_CASE("sampler: determinism, frequencies, seed sensitivity") {
  const IFS& ifs = bundled("dyadic").system;
  CHECK(sample_word(ifs, 500, 42) == sample_word(ifs, 500, 42));
  const Word w = sample_word(ifs, 10000, 1);
  const double ones = static_cast<double>(std::count(w.begin(), w.end(), Symbol{0})) / 1e4;
  CHECK(std::fabs(ones - 0.5) <= 3.0 * 0.5 / 100.0);
  std::set<Word> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(sample_word(ifs, 64, s));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("projection") {
  const IFS& ifs = bundled("golden_bc").system;
  CHECK(project_point(ifs, Word(40, 0))[0].is_zero());
  const Word i = sample_word(ifs, 30, 4);
  const double diam = ifs.hull().hi[0].to_double() - ifs.hull().lo[0].to_double();
  for (std::size_t k = 0; k + 1 < i.size(); ++k) {
    const double a = project_point(ifs, std::span(i).first(k))[0].to_double();
    const double b = project_point(ifs, std::span(i).first(k + 1))[0].to_double();
    CHECK(std::fabs(a - b) <= std::pow(ifs.ratio_max(), static_cast<double>(k)) * diam + 1e-15);
  }
  CHECK(std::fabs(project_point_double(ifs, i)[0] - project_point(ifs, i)[0].to_double()) < 1e-12);
}

TEST_CASE("word text format") {
  CHECK(parse_word("1,2,2", 2) == Word{0, 1, 1});
  CHECK(parse_word("-", 2).empty());
  CHECK(format_word(Word{0, 1, 1}) == "1,2,2");
  CHECK_THROWS(parse_word("1,3", 2));
  CHECK_THROWS(parse_word("x", 2));
}
