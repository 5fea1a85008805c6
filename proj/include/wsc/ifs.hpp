#pragma once

// Homothetic iterated function systems x -> r x + t with exact coefficients,
// finite-word algebra, attractor covers and three-valued geometric predicates.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wsc/numfield.hpp"

namespace wsc {

/// Symbols are stored 0-based; text formats use 1-based symbols.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

std::string format_word(std::span<const Symbol> w);
/// Parses "1,2,2" (1-based, comma or space separated); "" or "-" is the empty word.
Word parse_word(const std::string& s, int alphabet);

using Point = std::vector<FieldElement>;

/// x -> ratio * x + translation.
struct Similarity {
  FieldElement ratio;
  Point translation;

  static Similarity identity(const FieldPtr& f, int dim);

  int dim() const { return static_cast<int>(translation.size()); }
  /// (*this) o g
  Similarity compose(const Similarity& g) const;
  Similarity inverse() const;
  Point apply(const Point& x) const;
  bool is_identity() const;

  friend bool operator==(const Similarity& a, const Similarity& b) {
    return a.ratio == b.ratio && a.translation == b.translation;
  }
  std::size_t hash() const;
  std::string to_string() const;
};

/// Canonical order: ratio, then translation lexicographically, by real value.
std::strong_ordering canonical_compare(const Similarity& a, const Similarity& b);

struct SimilarityHash {
  std::size_t operator()(const Similarity& s) const noexcept { return s.hash(); }
};

/// Axis-aligned box [lo, hi] (per axis). In one dimension an interval.
struct CoverBox {
  Point lo;
  Point hi;

  CoverBox image(const Similarity& f) const;  // f has positive ratio
  bool contains(const CoverBox& other) const;
  bool intersects(const CoverBox& other) const;
  FieldElement max_radius_bound_sq() const;  // max over corners of |corner|^2
};

/// Closed Euclidean ball.
struct Ball {
  Point center;
  FieldElement radius;

  static Ball unit(const FieldPtr& f, int dim);
};

enum class BallRelation { disjoint, intersects, inside };
BallRelation relate(const CoverBox& box, const Ball& ball);

enum class Predicate { disjoint, intersects, unknown };
const char* to_string(Predicate p);

/// Floating point copy of a homothety, for the numerical engine.
struct FloatMap {
  double ratio = 1.0;
  std::array<double, 3> translation{0.0, 0.0, 0.0};
};
FloatMap to_float(const Similarity& s);

class IFS {
 public:
  /// Validates ratios in (0,1), positive probabilities summing to one, and a
  /// common field and dimension (1 <= dim <= 3).
  IFS(FieldPtr field, int dim, std::vector<Similarity> maps, std::vector<mpq_class> probs);

  const FieldPtr& field() const { return field_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(maps_.size()); }
  const std::vector<Similarity>& maps() const { return maps_; }
  const Similarity& map(int i) const { return maps_[static_cast<std::size_t>(i)]; }
  const std::vector<mpq_class>& probs() const { return probs_; }
  const std::vector<double>& probs_double() const { return probs_d_; }
  const std::vector<FloatMap>& float_maps() const { return float_maps_; }

  /// Per-axis bounding box of the attractor (exact and tight).
  const CoverBox& hull() const { return hull_; }
  /// Fixed points of the generators; these lie in K.
  const std::vector<Point>& anchors() const { return anchors_; }
  /// True when hull is one-dimensional and the first-level images tile it, so
  /// that the attractor equals its hull.
  bool hull_is_attractor() const { return connected_; }
  bool equicontractive() const { return equicontractive_; }
  double ratio_max() const { return ratio_max_; }
  double ratio_min() const { return ratio_min_; }
  /// Conjugacy applied by normalize_ifs: normalized = conj o raw o conj^-1.
  /// Identity for systems that were not normalized.
  const Similarity& normalization() const { return normalization_; }
  bool normalized() const { return normalized_; }

  mpq_class word_prob(std::span<const Symbol> w) const;
  double word_prob_double(std::span<const Symbol> w) const;
  FieldElement word_ratio(std::span<const Symbol> w) const;

  std::string describe() const;

 private:
  friend IFS normalize_ifs(const IFS& raw);

  FieldPtr field_;
  int dim_ = 1;
  std::vector<Similarity> maps_;
  std::vector<mpq_class> probs_;
  std::vector<double> probs_d_;
  std::vector<FloatMap> float_maps_;
  CoverBox hull_;
  std::vector<Point> anchors_;
  bool connected_ = false;
  bool equicontractive_ = false;
  double ratio_max_ = 0.0, ratio_min_ = 0.0;
  Similarity normalization_;
  bool normalized_ = false;
};

/// phi_a = phi_{a0} o ... o phi_{an}
Similarity compose_word(const IFS& ifs, std::span<const Symbol> a);
/// phi_a^-1 o phi_b
Similarity relative_map(const IFS& ifs, std::span<const Symbol> a, std::span<const Symbol> b);

/// Radius of the closed ball around the origin that contains the normalized hull.
mpq_class normalization_radius();

/// Conjugates so that the fixed point of the first map is the origin and the
/// hull lies in the closed ball of radius normalization_radius(). Rejects
/// systems with a single map.
IFS normalize_ifs(const IFS& raw);

/// Boxes phi_a(hull) for |a| = depth, in lexicographic word order.
std::vector<CoverBox> attractor_cover(const IFS& ifs, int depth);

/// Relation between g(K) and a ball, certified by the depth-n cover of g(K).
Predicate cover_ball_predicate(const IFS& ifs, const Similarity& g, const Ball& ball, int depth);
/// K_b versus a ball.
Predicate intersect_predicate(const IFS& ifs, std::span<const Symbol> b, const Ball& ball, int depth);
/// g(K) versus K itself.
Predicate set_intersection_predicate(const IFS& ifs, const Similarity& g, int depth);

/// Deterministic categorical sampler. The generator is std::mt19937_64 (fully
/// specified by the standard); each symbol consumes one 64-bit draw u and is
/// the first j with u < floor(2^64 * (p_0 + ... + p_j)).
class WordSampler {
 public:
  WordSampler(const IFS& ifs, std::uint64_t seed);
  Symbol next();
  Word sample(std::size_t n);

 private:
  std::mt19937_64 gen_;
  std::vector<std::uint64_t> thresholds_;
};

Word sample_word(const IFS& ifs, std::size_t length, std::uint64_t seed);

/// Independent stream seed (splitmix64 of seed and stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// phi_{i|k}(0), exact.
Point project_point(const IFS& ifs, std::span<const Symbol> i);
/// Floating evaluation of phi_i(0) (Horner from the tail).
std::array<double, 3> project_point_double(const IFS& ifs, std::span<const Symbol> i);

}  // namespace wsc
