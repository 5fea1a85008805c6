#include "wsc/numfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wsc {

namespace {

constexpr long kCacheBits = 128;

mpq_class pow2(long e) {
  mpq_class r = 1;
  if (e >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  r.canonicalize();
  return r;
}

RationalInterval mul(const RationalInterval& a, const RationalInterval& b) {
  mpq_class c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

RationalInterval scale(const RationalInterval& a, const mpq_class& q) {
  if (q >= 0) return {a.lo * q, a.hi * q};
  return {a.hi * q, a.lo * q};
}

std::vector<RationalInterval> power_enclosures(const RationalInterval& root, int degree) {
  std::vector<RationalInterval> pw;
  pw.reserve(static_cast<std::size_t>(std::max(degree, 1)));
  pw.push_back({mpq_class(1), mpq_class(1)});
  for (int i = 1; i < degree; ++i) pw.push_back(mul(pw.back(), root));
  return pw;
}

int sign_of(const mpq_class& q) { return sgn(q); }

// Halve the isolating interval until its width is <= 2^-bits.
RationalInterval refine(const QPoly& p, RationalInterval iv, long bits) {
  const mpq_class target = pow2(-bits);
  int slo = sign_of(poly::eval(p, iv.lo));
  while (iv.width() > target) {
    mpq_class mid = (iv.lo + iv.hi) / 2;
    int sm = sign_of(poly::eval(p, mid));
    if (sm == 0) return {mid, mid};
    if (sm == slo) {
      iv.lo = mid;
    } else {
      iv.hi = mid;
    }
  }
  return iv;
}

double next_down(double x) { return std::nextafter(x, -INFINITY); }
double next_up(double x) { return std::nextafter(x, INFINITY); }

}  // namespace

double RationalInterval::lo_double() const { return next_down(lo.get_d()); }
double RationalInterval::hi_double() const { return next_up(hi.get_d()); }
double RationalInterval::mid_double() const {
  mpq_class m = (lo + hi) / 2;
  return m.get_d();
}

// ---------------------------------------------------------------------------
// Polynomials over Q

namespace poly {

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

QPoly derivative(const QPoly& p) {
  QPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

mpq_class eval(const QPoly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly rem(const QPoly& a, const QPoly& b) {
  QPoly r = a;
  trim(r);
  const int db = degree(b);
  if (db < 0) throw FieldError("polynomial division by zero");
  const mpq_class lead = b.back();
  while (degree(r) >= db) {
    const int shift = degree(r) - db;
    const mpq_class f = r.back() / lead;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(i + shift)] -= f * b[static_cast<std::size_t>(i)];
    r.pop_back();
    trim(r);
  }
  return r;
}

QPoly gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

namespace {
int sign_changes(const std::vector<QPoly>& seq, const mpq_class& x) {
  int changes = 0;
  int prev = 0;
  for (const auto& p : seq) {
    int s = sgn(eval(p, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}
}  // namespace

int sturm_count(const QPoly& p, const mpq_class& lo, const mpq_class& hi) {
  std::vector<QPoly> seq;
  QPoly a = p;
  trim(a);
  seq.push_back(a);
  seq.push_back(derivative(a));
  while (!seq.back().empty()) {
    QPoly r = rem(seq[seq.size() - 2], seq.back());
    for (auto& c : r) c = -c;
    if (r.empty()) break;
    seq.push_back(std::move(r));
  }
  if (seq.back().empty()) seq.pop_back();
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

}  // namespace poly

// ---------------------------------------------------------------------------
// AlgebraicField

FieldPtr AlgebraicField::create(std::vector<mpz_class> minpoly, mpq_class lo, mpq_class hi) {
  while (minpoly.size() > 1 && minpoly.back() == 0) minpoly.pop_back();
  if (minpoly.size() < 2) throw FieldError("minimal polynomial must have degree >= 1");
  if (minpoly.back() != 1) throw FieldError("minimal polynomial must be monic");
  if (!(lo < hi)) throw FieldError("isolating interval must satisfy lo < hi");

  QPoly pq(minpoly.begin(), minpoly.end());
  if (sgn(poly::eval(pq, lo)) == 0 || sgn(poly::eval(pq, hi)) == 0)
    throw FieldError("isolating interval endpoint is a root of the minimal polynomial");
  const QPoly g = poly::gcd(pq, poly::derivative(pq));
  if (poly::degree(g) > 0) throw FieldError("minimal polynomial is not square-free");
  const int roots = poly::sturm_count(pq, lo, hi);
  if (roots != 1)
    throw FieldError("isolating interval contains " + std::to_string(roots) +
                     " real roots; exactly one required");
  if (sgn(poly::eval(pq, lo)) == sgn(poly::eval(pq, hi)))
    throw FieldError("minimal polynomial has no sign change on the isolating interval");

  // A rational root of a monic integer polynomial is an integer dividing the
  // constant term; for degree >= 2 that would make the polynomial reducible.
  // This catches every reducible quadratic and cubic.
  const int deg = static_cast<int>(minpoly.size()) - 1;
  if (deg >= 2) {
    mpz_class c0 = abs(minpoly[0]);
    if (c0 == 0) throw FieldError("minimal polynomial is divisible by x");
    if (c0 < 1000000) {
      const long n = c0.get_si();
      for (long d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        for (long s : {d, -d}) {
          if (sgn(poly::eval(pq, mpq_class(s))) == 0)
            throw FieldError("minimal polynomial has the rational root " + std::to_string(s));
        }
      }
    }
  }

  std::shared_ptr<AlgebraicField> f(new AlgebraicField());
  f->minpoly_ = std::move(minpoly);
  f->minpoly_q_ = std::move(pq);
  f->original_ = {lo, hi};
  f->init_cache();
  return f;
}

FieldPtr AlgebraicField::rationals() {
  static const FieldPtr q = create({mpz_class(0), mpz_class(1)}, mpq_class(-1), mpq_class(1));
  return q;
}

void AlgebraicField::init_cache() {
  root_ = refine(minpoly_q_, original_, kCacheBits);
  powers_ = power_enclosures(root_, degree());
  root_double_ = root_.mid_double();
}

RationalInterval AlgebraicField::root_interval(long bits) const {
  if (bits <= kCacheBits) return root_;
  return refine(minpoly_q_, root_, bits);
}

std::string AlgebraicField::describe() const {
  std::ostringstream os;
  os << "minpoly [";
  for (std::size_t i = 0; i < minpoly_.size(); ++i) os << (i ? " " : "") << minpoly_[i].get_str();
  os << "] root in [" << rational_to_string(original_.lo) << ", " << rational_to_string(original_.hi)
     << "] ~ " << root_double_;
  return os.str();
}

// ---------------------------------------------------------------------------
// FieldElement

FieldElement::FieldElement(FieldPtr field, std::vector<mpq_class> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  if (!field_) throw FieldError("field element without field");
  const auto d = static_cast<std::size_t>(field_->degree());
  if (coeffs_.size() > d) {
    // Reduce an arbitrary-degree polynomial representative.
    QPoly r = poly::rem(coeffs_, field_->minpoly_q_);
    coeffs_ = std::move(r);
  }
  coeffs_.resize(d, mpq_class(0));
  for (auto& c : coeffs_) c.canonicalize();
}

FieldElement FieldElement::zero(const FieldPtr& f) { return FieldElement(f, {}); }
FieldElement FieldElement::one(const FieldPtr& f) { return FieldElement(f, {mpq_class(1)}); }
FieldElement FieldElement::rational(const FieldPtr& f, const mpq_class& q) { return FieldElement(f, {q}); }
FieldElement FieldElement::generator(const FieldPtr& f) {
  return FieldElement(f, {mpq_class(0), mpq_class(1)});
}

bool FieldElement::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const mpq_class& c) { return c == 0; });
}

bool FieldElement::is_rational() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const mpq_class& c) { return c == 0; });
}

void FieldElement::check_same(const FieldElement& o) const {
  if (field_ != o.field_) throw FieldError("field elements from different fields");
}

FieldElement FieldElement::operator-() const {
  FieldElement r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  check_same(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
  check_same(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator*=(const mpq_class& q) {
  for (auto& c : coeffs_) c *= q;
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
  check_same(o);
  const std::size_t d = coeffs_.size();
  if (d == 1) {
    coeffs_[0] *= o.coeffs_[0];
    return *this;
  }
  std::vector<mpq_class> prod(2 * d - 1, mpq_class(0));
  for (std::size_t i = 0; i < d; ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (o.coeffs_[j] == 0) continue;
      prod[i + j] += coeffs_[i] * o.coeffs_[j];
    }
  }
  // minpoly is monic: x^d = -sum_{i<d} m_i x^i.
  const auto& m = field_->minpoly_;
  for (std::size_t k = 2 * d - 2; k >= d; --k) {
    if (prod[k] == 0) continue;
    const mpq_class top = prod[k];
    for (std::size_t i = 0; i < d; ++i) prod[k - d + i] -= top * m[i];
    prod[k] = 0;
  }
  prod.resize(d);
  coeffs_ = std::move(prod);
  return *this;
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw FieldError("inversion of zero field element");
  const std::size_t d = coeffs_.size();
  if (d == 1) return FieldElement(field_, {1 / coeffs_[0]});
  // Extended Euclid: find s with s*a = 1 mod minpoly.
  QPoly r0 = field_->minpoly_q_, r1 = coeffs_;
  poly::trim(r1);
  QPoly s0 = {}, s1 = {mpq_class(1)};
  while (poly::degree(r1) > 0) {
    // q = r0 / r1
    QPoly q(static_cast<std::size_t>(poly::degree(r0) - poly::degree(r1) + 1), mpq_class(0));
    QPoly r = r0;
    const mpq_class lead = r1.back();
    while (poly::degree(r) >= poly::degree(r1)) {
      const int shift = poly::degree(r) - poly::degree(r1);
      const mpq_class f = r.back() / lead;
      q[static_cast<std::size_t>(shift)] = f;
      for (int i = 0; i <= poly::degree(r1); ++i) r[static_cast<std::size_t>(i + shift)] -= f * r1[static_cast<std::size_t>(i)];
      r.pop_back();
      poly::trim(r);
    }
    // s2 = s0 - q*s1
    QPoly qs(q.size() + s1.size(), mpq_class(0));
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
    QPoly s2 = s0;
    if (s2.size() < qs.size()) s2.resize(qs.size(), mpq_class(0));
    for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
    poly::trim(s2);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    if (r1.empty()) throw FieldError("element is a zero divisor: minimal polynomial is reducible");
  }
  const mpq_class c = r1[0];
  for (auto& v : s1) v /= c;
  return FieldElement(field_, s1);
}

FieldElement FieldElement::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  FieldElement result = one(field_), base = *this;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

RationalInterval FieldElement::enclose_with(const std::vector<RationalInterval>& powers) const {
  RationalInterval acc{mpq_class(0), mpq_class(0)};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    RationalInterval t = scale(powers[i], coeffs_[i]);
    acc.lo += t.lo;
    acc.hi += t.hi;
  }
  return acc;
}

int FieldElement::sign() const {
  if (is_zero()) return 0;
  if (is_rational()) return sgn(coeffs_[0]);
  RationalInterval iv = enclose_with(field_->powers_);
  if (iv.lo > 0) return 1;
  if (iv.hi < 0) return -1;
  // Nonzero element of a field: refinement terminates.
  long bits = kCacheBits;
  RationalInterval root = field_->root_;
  while (true) {
    bits *= 2;
    root = refine(field_->minpoly_q_, root, bits);
    iv = enclose_with(power_enclosures(root, field_->degree()));
    if (iv.lo > 0) return 1;
    if (iv.hi < 0) return -1;
  }
}

RationalInterval FieldElement::embed(long bits) const {
  if (bits < 1) throw FieldError("embedding precision must be >= 1 bit");
  if (is_rational()) return {coeffs_[0], coeffs_[0]};
  const mpq_class target = pow2(-bits);
  RationalInterval iv = enclose_with(field_->powers_);
  if (iv.width() <= target) return iv;
  // Scale the root precision with the coefficient sizes.
  long extra = 0;
  for (const auto& c : coeffs_) {
    if (c == 0) continue;
    long nb = static_cast<long>(mpz_sizeinbase(c.get_num_mpz_t(), 2));
    long db = static_cast<long>(mpz_sizeinbase(c.get_den_mpz_t(), 2));
    extra = std::max(extra, nb - db + 2);
  }
  long rb = bits + extra + 8 + static_cast<long>(field_->degree());
  while (true) {
    RationalInterval root = field_->root_interval(rb);
    iv = enclose_with(power_enclosures(root, field_->degree()));
    if (iv.width() <= target) return iv;
    rb += 32;
  }
}

double FieldElement::to_double() const {
  if (is_rational()) return coeffs_[0].get_d();
  return embed(64).mid_double();
}

bool operator==(const FieldElement& a, const FieldElement& b) {
  a.check_same(b);
  return a.coeffs_ == b.coeffs_;
}

std::strong_ordering compare(const FieldElement& a, const FieldElement& b) {
  const int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t FieldElement::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& c : coeffs_) {
    mix(static_cast<std::size_t>(mpz_get_ui(c.get_num_mpz_t())));
    mix(static_cast<std::size_t>(mpz_sgn(c.get_num_mpz_t()) + 2));
    mix(static_cast<std::size_t>(mpz_get_ui(c.get_den_mpz_t())));
    mix(mpz_size(c.get_num_mpz_t()));
  }
  return h;
}

std::string FieldElement::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) s += ' ';
    s += rational_to_string(coeffs_[i]);
  }
  return s;
}

FieldElement min(const FieldElement& a, const FieldElement& b) { return a <= b ? a : b; }
FieldElement max(const FieldElement& a, const FieldElement& b) { return a >= b ? a : b; }

mpq_class parse_rational(const std::string& s) {
  if (s.empty()) throw FieldError("empty rational");
  const auto slash = s.find('/');
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };
  if (slash == std::string::npos) {
    if (!valid_int(s)) throw FieldError("malformed rational '" + s + "'");
    return mpq_class(mpz_class(strip_plus(s)));
  }
  const std::string n = s.substr(0, slash), d = s.substr(slash + 1);
  if (!valid_int(n) || !valid_int(d) || d[0] == '-' || d[0] == '+')
    throw FieldError("malformed rational '" + s + "'");
  mpz_class den(d);
  if (den == 0) throw FieldError("zero denominator in '" + s + "'");
  mpq_class q(mpz_class(strip_plus(n)), den);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

}  // namespace wsc
