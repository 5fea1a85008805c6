#include "wsc/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace wsc {

std::string format_word(std::span<const Symbol> w) {
  if (w.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(static_cast<int>(w[i]) + 1);
  }
  return s;
}

Word parse_word(const std::string& s, int alphabet) {
  Word w;
  if (s.empty() || s == "-") return w;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    for (char c : tok)
      if (c < '0' || c > '9') throw std::invalid_argument("malformed word '" + s + "'");
    int v = std::stoi(tok);
    if (v < 1 || v > alphabet)
      throw std::invalid_argument("symbol " + tok + " out of range 1.." + std::to_string(alphabet));
    w.push_back(static_cast<Symbol>(v - 1));
    tok.clear();
  };
  for (char c : s) {
    if (c == ',' || c == ' ') {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  return w;
}

// ---------------------------------------------------------------------------
// Similarity

Similarity Similarity::identity(const FieldPtr& f, int dim) {
  return {FieldElement::one(f), Point(static_cast<std::size_t>(dim), FieldElement::zero(f))};
}

Similarity Similarity::compose(const Similarity& g) const {
  Similarity r{ratio * g.ratio, translation};
  for (std::size_t k = 0; k < translation.size(); ++k) r.translation[k] = ratio * g.translation[k] + translation[k];
  return r;
}

Similarity Similarity::inverse() const {
  FieldElement inv = ratio.inverse();
  Similarity r{inv, translation};
  for (auto& t : r.translation) t = -(t * inv);
  return r;
}

Point Similarity::apply(const Point& x) const {
  Point y = x;
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = ratio * x[k] + translation[k];
  return y;
}

bool Similarity::is_identity() const {
  if (!(ratio == FieldElement::one(ratio.field()))) return false;
  return std::all_of(translation.begin(), translation.end(), [](const FieldElement& t) { return t.is_zero(); });
}

std::size_t Similarity::hash() const {
  std::size_t h = ratio.hash();
  for (const auto& t : translation) h = h * 1000003u ^ t.hash();
  return h;
}

std::string Similarity::to_string() const {
  std::ostringstream os;
  os << "ratio=[" << ratio.to_string() << "] translation=";
  for (std::size_t k = 0; k < translation.size(); ++k) os << (k ? "|" : "[") << translation[k].to_string();
  os << "]";
  return os.str();
}

std::strong_ordering canonical_compare(const Similarity& a, const Similarity& b) {
  if (!(a.ratio == b.ratio)) return compare(a.ratio, b.ratio);
  for (std::size_t k = 0; k < a.translation.size(); ++k) {
    if (!(a.translation[k] == b.translation[k])) return compare(a.translation[k], b.translation[k]);
  }
  return std::strong_ordering::equal;
}

FloatMap to_float(const Similarity& s) {
  FloatMap m;
  m.ratio = s.ratio.to_double();
  for (std::size_t k = 0; k < s.translation.size() && k < 3; ++k) m.translation[k] = s.translation[k].to_double();
  return m;
}

// ---------------------------------------------------------------------------
// Boxes and balls

CoverBox CoverBox::image(const Similarity& f) const {
  CoverBox b{lo, hi};
  for (std::size_t k = 0; k < lo.size(); ++k) {
    b.lo[k] = f.ratio * lo[k] + f.translation[k];
    b.hi[k] = f.ratio * hi[k] + f.translation[k];
  }
  return b;
}

bool CoverBox::contains(const CoverBox& o) const {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (o.lo[k] < lo[k] || o.hi[k] > hi[k]) return false;
  }
  return true;
}

bool CoverBox::intersects(const CoverBox& o) const {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (o.hi[k] < lo[k] || hi[k] < o.lo[k]) return false;
  }
  return true;
}

FieldElement CoverBox::max_radius_bound_sq() const {
  FieldElement s = FieldElement::zero(lo[0].field());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    FieldElement m = max(lo[k].abs(), hi[k].abs());
    s += m * m;
  }
  return s;
}

Ball Ball::unit(const FieldPtr& f, int dim) {
  return {Point(static_cast<std::size_t>(dim), FieldElement::zero(f)), FieldElement::one(f)};
}

BallRelation relate(const CoverBox& box, const Ball& ball) {
  const FieldPtr& f = ball.radius.field();
  const FieldElement r2 = ball.radius * ball.radius;
  if (box.lo.size() == 1) {
    const FieldElement a = ball.center[0] - ball.radius, b = ball.center[0] + ball.radius;
    if (box.hi[0] < a || box.lo[0] > b) return BallRelation::disjoint;
    if (box.lo[0] >= a && box.hi[0] <= b) return BallRelation::inside;
    return BallRelation::intersects;
  }
  FieldElement near = FieldElement::zero(f), far = FieldElement::zero(f);
  for (std::size_t k = 0; k < box.lo.size(); ++k) {
    const FieldElement dl = ball.center[k] - box.lo[k];  // >0 when center is right of lo
    const FieldElement dh = box.hi[k] - ball.center[k];
    FieldElement gap = FieldElement::zero(f);
    if (dl.sign() < 0) gap = -dl;
    else if (dh.sign() < 0) gap = -dh;
    near += gap * gap;
    const FieldElement ext = max(dl.abs(), dh.abs());
    far += ext * ext;
  }
  if (near > r2) return BallRelation::disjoint;
  if (far <= r2) return BallRelation::inside;
  return BallRelation::intersects;
}

const char* to_string(Predicate p) {
  switch (p) {
    case Predicate::disjoint: return "disjoint";
    case Predicate::intersects: return "intersects";
    case Predicate::unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// IFS

namespace {

Point fixed_point(const Similarity& s) {
  const FieldElement denom = (FieldElement::one(s.ratio.field()) - s.ratio).inverse();
  Point p = s.translation;
  for (auto& c : p) c *= denom;
  return p;
}

CoverBox compute_hull(const std::vector<Similarity>& maps, int dim) {
  // For positive homotheties the extreme coordinates of K are attained at
  // fixed points of the generators, axis by axis.
  std::vector<Point> fps;
  for (const auto& m : maps) fps.push_back(fixed_point(m));
  CoverBox b{fps[0], fps[0]};
  for (const auto& p : fps) {
    for (int k = 0; k < dim; ++k) {
      b.lo[static_cast<std::size_t>(k)] = min(b.lo[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)]);
      b.hi[static_cast<std::size_t>(k)] = max(b.hi[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)]);
    }
  }
  return b;
}

bool images_tile_hull(const std::vector<Similarity>& maps, const CoverBox& hull) {
  if (hull.lo.size() != 1) return false;
  std::vector<CoverBox> im;
  for (const auto& m : maps) im.push_back(hull.image(m));
  std::sort(im.begin(), im.end(), [](const CoverBox& a, const CoverBox& b) { return a.lo[0] < b.lo[0]; });
  if (!(im.front().lo[0] == hull.lo[0])) return false;
  FieldElement reach = im.front().hi[0];
  for (std::size_t i = 1; i < im.size(); ++i) {
    if (im[i].lo[0] > reach) return false;
    reach = max(reach, im[i].hi[0]);
  }
  return reach == hull.hi[0];
}

}  // namespace

IFS::IFS(FieldPtr field, int dim, std::vector<Similarity> maps, std::vector<mpq_class> probs)
    : field_(std::move(field)), dim_(dim), maps_(std::move(maps)), probs_(std::move(probs)) {
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (maps_.empty()) throw std::invalid_argument("IFS needs at least one map");
  if (maps_.size() > 255) throw std::invalid_argument("at most 255 maps are supported");
  if (probs_.size() != maps_.size()) throw std::invalid_argument("one probability per map required");
  mpq_class total = 0;
  for (const auto& p : probs_) {
    if (p <= 0) throw std::invalid_argument("probabilities must be strictly positive");
    total += p;
  }
  if (total != 1) throw std::invalid_argument("probabilities must sum to 1 (got " + total.get_str() + ")");
  const FieldElement zero = FieldElement::zero(field_), one = FieldElement::one(field_);
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& m = maps_[i];
    if (m.ratio.field() != field_) throw std::invalid_argument("map coefficients must lie in the configured field");
    if (m.dim() != dim_) throw std::invalid_argument("translation dimension mismatch in map " + std::to_string(i + 1));
    if (m.ratio <= zero || m.ratio >= one)
      throw std::invalid_argument("ratio of map " + std::to_string(i + 1) + " must lie in (0,1)");
  }
  equicontractive_ = std::all_of(maps_.begin(), maps_.end(), [&](const Similarity& m) { return m.ratio == maps_[0].ratio; });
  for (const auto& p : probs_) probs_d_.push_back(p.get_d());
  ratio_max_ = 0.0;
  ratio_min_ = 1.0;
  for (const auto& m : maps_) {
    float_maps_.push_back(to_float(m));
    ratio_max_ = std::max(ratio_max_, float_maps_.back().ratio);
    ratio_min_ = std::min(ratio_min_, float_maps_.back().ratio);
  }
  hull_ = compute_hull(maps_, dim_);
  for (const auto& m : maps_) anchors_.push_back(fixed_point(m));
  connected_ = images_tile_hull(maps_, hull_);
  normalization_ = Similarity::identity(field_, dim_);
}

mpq_class IFS::word_prob(std::span<const Symbol> w) const {
  mpq_class p = 1;
  for (Symbol s : w) p *= probs_[s];
  return p;
}

double IFS::word_prob_double(std::span<const Symbol> w) const {
  double p = 1.0;
  for (Symbol s : w) p *= probs_d_[s];
  return p;
}

FieldElement IFS::word_ratio(std::span<const Symbol> w) const {
  FieldElement r = FieldElement::one(field_);
  for (Symbol s : w) r *= maps_[s].ratio;
  return r;
}

std::string IFS::describe() const {
  std::ostringstream os;
  os << "field: " << field_->describe() << "\n";
  os << "dim: " << dim_ << "\n";
  for (std::size_t i = 0; i < maps_.size(); ++i)
    os << "map " << (i + 1) << ": " << maps_[i].to_string() << " prob=" << probs_[i].get_str() << "\n";
  os << "hull:";
  for (int k = 0; k < dim_; ++k)
    os << " [" << hull_.lo[static_cast<std::size_t>(k)].to_double() << ", " << hull_.hi[static_cast<std::size_t>(k)].to_double() << "]";
  os << "\nattractor equals hull: " << (connected_ ? "yes" : "no") << "\n";
  os << "equicontractive: " << (equicontractive_ ? "yes" : "no") << "\n";
  if (normalized_) os << "normalization: " << normalization_.to_string() << "\n";
  return os.str();
}

Similarity compose_word(const IFS& ifs, std::span<const Symbol> a) {
  Similarity r = Similarity::identity(ifs.field(), ifs.dim());
  for (Symbol s : a) r = r.compose(ifs.map(s));
  return r;
}

Similarity relative_map(const IFS& ifs, std::span<const Symbol> a, std::span<const Symbol> b) {
  return compose_word(ifs, a).inverse().compose(compose_word(ifs, b));
}

mpq_class normalization_radius() { return mpq_class(3, 4); }

IFS normalize_ifs(const IFS& raw) {
  if (raw.size() < 2) throw std::invalid_argument("a single-map IFS has a point attractor; nothing to normalize");
  const FieldPtr& f = raw.field();
  const int d = raw.dim();
  const Point origin = fixed_point(raw.map(0));
  CoverBox shifted = raw.hull();
  for (int k = 0; k < d; ++k) {
    shifted.lo[static_cast<std::size_t>(k)] -= origin[static_cast<std::size_t>(k)];
    shifted.hi[static_cast<std::size_t>(k)] -= origin[static_cast<std::size_t>(k)];
  }
  // Hull radius about the new origin.
  FieldElement radius = FieldElement::zero(f);
  if (d == 1) {
    radius = max(shifted.lo[0].abs(), shifted.hi[0].abs());
  } else {
    const FieldElement r2 = shifted.max_radius_bound_sq();
    // Exact square root when r2 is a rational square, else a rational upper bound.
    bool exact = false;
    if (r2.is_rational()) {
      const mpq_class q = r2.rational_part();
      mpz_class n = q.get_num(), den = q.get_den();
      if (mpz_perfect_square_p(n.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
        mpz_class sn, sd;
        mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
        radius = FieldElement::rational(f, mpq_class(sn, sd));
        exact = true;
      }
    }
    if (!exact) {
      const double approx = std::sqrt(r2.embed(64).hi_double());
      mpq_class ub(static_cast<long>(std::ceil(approx * 1048576.0)) + 1, 1048576);
      ub.canonicalize();
      while (FieldElement::rational(f, ub * ub) < r2) ub *= mpq_class(17, 16);
      radius = FieldElement::rational(f, ub);
    }
  }
  if (radius.is_zero()) throw std::invalid_argument("degenerate IFS: all maps share a fixed point");
  const FieldElement scale = FieldElement::rational(f, normalization_radius()) * radius.inverse();
  Similarity conj{scale, origin};
  for (auto& t : conj.translation) t = -(t * scale);

  std::vector<Similarity> maps;
  for (const auto& m : raw.maps()) {
    // conj o m o conj^-1 = r y + s (r o + t - o)
    Similarity n{m.ratio, m.translation};
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      n.translation[kk] = scale * (m.ratio * origin[kk] + m.translation[kk] - origin[kk]);
    }
    maps.push_back(std::move(n));
  }
  IFS out(f, d, std::move(maps), raw.probs());
  out.normalization_ = conj.compose(raw.normalization());
  out.normalized_ = true;
  return out;
}

std::vector<CoverBox> attractor_cover(const IFS& ifs, int depth) {
  std::vector<Similarity> level{Similarity::identity(ifs.field(), ifs.dim())};
  for (int n = 0; n < depth; ++n) {
    std::vector<Similarity> next;
    next.reserve(level.size() * static_cast<std::size_t>(ifs.size()));
    for (const auto& g : level)
      for (int j = 0; j < ifs.size(); ++j) next.push_back(g.compose(ifs.map(j)));
    level = std::move(next);
  }
  std::vector<CoverBox> boxes;
  boxes.reserve(level.size());
  for (const auto& g : level) boxes.push_back(ifs.hull().image(g));
  return boxes;
}

namespace {

bool in_ball_anchor(const IFS& ifs, const Similarity& g, const Ball& ball) {
  const FieldElement r2 = ball.radius * ball.radius;
  for (const auto& a : ifs.anchors()) {
    FieldElement d2 = FieldElement::zero(ifs.field());
    for (std::size_t k = 0; k < a.size(); ++k) {
      const FieldElement d = g.ratio * a[k] + g.translation[k] - ball.center[k];
      d2 += d * d;
    }
    if (d2 <= r2) return true;
  }
  return false;
}

bool shared_anchor(const IFS& ifs, const Similarity& g, const Similarity& h) {
  for (const auto& a : ifs.anchors()) {
    const Point ga = g.apply(a);
    for (const auto& b : ifs.anchors())
      if (ga == h.apply(b)) return true;
  }
  return false;
}

// Depth-first walk over the cover boxes g o phi_c(hull), |c| <= depth.
Predicate cover_walk(const IFS& ifs, const Similarity& g, const Ball& ball, int depth) {
  const CoverBox box = ifs.hull().image(g);
  const BallRelation rel = relate(box, ball);
  if (rel == BallRelation::disjoint) return Predicate::disjoint;
  if (rel == BallRelation::inside) return Predicate::intersects;
  if (ifs.hull_is_attractor()) return Predicate::intersects;
  if (in_ball_anchor(ifs, g, ball)) return Predicate::intersects;
  if (depth == 0) return Predicate::unknown;
  bool unknown = false;
  for (int j = 0; j < ifs.size(); ++j) {
    const Predicate p = cover_walk(ifs, g.compose(ifs.map(j)), ball, depth - 1);
    if (p == Predicate::intersects) return p;
    if (p == Predicate::unknown) unknown = true;
  }
  return unknown ? Predicate::unknown : Predicate::disjoint;
}

Predicate set_walk(const IFS& ifs, const Similarity& g, const Similarity& h, int depth) {
  const CoverBox a = ifs.hull().image(g), b = ifs.hull().image(h);
  if (!a.intersects(b)) return Predicate::disjoint;
  if (ifs.hull_is_attractor()) return Predicate::intersects;
  if (g == h) return Predicate::intersects;
  if (shared_anchor(ifs, g, h)) return Predicate::intersects;
  if (depth == 0) return Predicate::unknown;
  bool unknown = false;
  // Refine the larger piece first so the two sides stay comparable.
  const bool split_g = g.ratio >= h.ratio;
  for (int j = 0; j < ifs.size(); ++j) {
    const Predicate p = split_g ? set_walk(ifs, g.compose(ifs.map(j)), h, depth - 1)
                                : set_walk(ifs, g, h.compose(ifs.map(j)), depth - 1);
    if (p == Predicate::intersects) return p;
    if (p == Predicate::unknown) unknown = true;
  }
  return unknown ? Predicate::unknown : Predicate::disjoint;
}

}  // namespace

Predicate cover_ball_predicate(const IFS& ifs, const Similarity& g, const Ball& ball, int depth) {
  return cover_walk(ifs, g, ball, depth);
}

Predicate intersect_predicate(const IFS& ifs, std::span<const Symbol> b, const Ball& ball, int depth) {
  return cover_walk(ifs, compose_word(ifs, b), ball, depth);
}

Predicate set_intersection_predicate(const IFS& ifs, const Similarity& g, int depth) {
  return set_walk(ifs, g, Similarity::identity(ifs.field(), ifs.dim()), 2 * depth);
}

// ---------------------------------------------------------------------------
// Sampling and projection

WordSampler::WordSampler(const IFS& ifs, std::uint64_t seed) : gen_(seed) {
  mpq_class cum = 0;
  mpz_class two64 = 1;
  two64 <<= 64;
  for (int j = 0; j + 1 < ifs.size(); ++j) {
    cum += ifs.probs()[static_cast<std::size_t>(j)];
    mpz_class t = two64 * cum.get_num() / cum.get_den();
    thresholds_.push_back(static_cast<std::uint64_t>(mpz_get_ui(t.get_mpz_t())));
  }
}

Symbol WordSampler::next() {
  const std::uint64_t u = gen_();
  for (std::size_t j = 0; j < thresholds_.size(); ++j)
    if (u < thresholds_[j]) return static_cast<Symbol>(j);
  return static_cast<Symbol>(thresholds_.size());
}

Word WordSampler::sample(std::size_t n) {
  Word w(n);
  for (auto& s : w) s = next();
  return w;
}

Word sample_word(const IFS& ifs, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("sample length must be >= 1");
  return WordSampler(ifs, seed).sample(length);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Point project_point(const IFS& ifs, std::span<const Symbol> i) {
  return compose_word(ifs, i).translation;
}

std::array<double, 3> project_point_double(const IFS& ifs, std::span<const Symbol> i) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const auto& fm = ifs.float_maps();
  for (auto it = i.rbegin(); it != i.rend(); ++it) {
    const FloatMap& m = fm[*it];
    for (int k = 0; k < ifs.dim(); ++k) x[static_cast<std::size_t>(k)] = m.ratio * x[static_cast<std::size_t>(k)] + m.translation[static_cast<std::size_t>(k)];
  }
  return x;
}

}  // namespace wsc
