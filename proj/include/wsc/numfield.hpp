#pragma once

// Exact arithmetic in a real algebraic number field Q(theta), where theta is
// the unique real root of an integer monic polynomial inside a rational
// isolating interval. Elements are stored in the power basis with rational
// coefficients; comparisons refine the isolating interval until the sign of
// the difference is certain.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsc {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed interval with rational endpoints.
struct RationalInterval {
  mpq_class lo;
  mpq_class hi;

  mpq_class width() const { return hi - lo; }
  bool contains(const mpq_class& v) const { return lo <= v && v <= hi; }
  /// Outward-rounded double enclosure.
  double lo_double() const;
  double hi_double() const;
  double mid_double() const;
};

/// Dense polynomial over Q, coefficient i multiplies x^i.
using QPoly = std::vector<mpq_class>;

namespace poly {
void trim(QPoly& p);
int degree(const QPoly& p);
QPoly derivative(const QPoly& p);
mpq_class eval(const QPoly& p, const mpq_class& x);
/// Polynomial remainder of a by b (b nonzero).
QPoly rem(const QPoly& a, const QPoly& b);
QPoly gcd(QPoly a, QPoly b);
/// Number of distinct real roots in the half-open interval (lo, hi].
int sturm_count(const QPoly& p, const mpq_class& lo, const mpq_class& hi);
}  // namespace poly

class FieldElement;

/// The number field. Shared by every element it produces; immutable after
/// construction, so it may be used from several threads.
class AlgebraicField {
 public:
  /// minpoly: integer coefficients low-to-high, monic. The interval must
  /// isolate exactly one real root, which must not be an endpoint.
  static std::shared_ptr<const AlgebraicField> create(std::vector<mpz_class> minpoly,
                                                      mpq_class lo, mpq_class hi);
  /// Degree-one field Q (minpoly x, root 0).
  static std::shared_ptr<const AlgebraicField> rationals();

  int degree() const { return static_cast<int>(minpoly_.size()) - 1; }
  const std::vector<mpz_class>& minpoly() const { return minpoly_; }
  const QPoly& minpoly_q() const { return minpoly_q_; }
  const RationalInterval& isolating_interval() const { return root_; }

  /// Interval of width <= 2^-bits around the generator.
  RationalInterval root_interval(long bits) const;
  /// Approximate value of the generator.
  double root_double() const { return root_double_; }

  std::string describe() const;

 private:
  AlgebraicField() = default;
  void init_cache();

  std::vector<mpz_class> minpoly_;
  QPoly minpoly_q_;
  RationalInterval original_;
  RationalInterval root_;  // refined to the cache precision
  std::vector<RationalInterval> powers_;  // enclosures of theta^i, i < degree
  double root_double_ = 0.0;

  friend class FieldElement;
};

using FieldPtr = std::shared_ptr<const AlgebraicField>;

/// Exact element of an AlgebraicField.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, std::vector<mpq_class> coeffs);

  static FieldElement zero(const FieldPtr& f);
  static FieldElement one(const FieldPtr& f);
  static FieldElement rational(const FieldPtr& f, const mpq_class& q);
  /// The generator theta.
  static FieldElement generator(const FieldPtr& f);

  const FieldPtr& field() const { return field_; }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }

  bool is_zero() const;
  bool is_rational() const;
  /// Constant coefficient (the value when is_rational()).
  const mpq_class& rational_part() const { return coeffs_[0]; }

  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  FieldElement& operator*=(const mpq_class& q);
  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator*(FieldElement a, const mpq_class& q) { return a *= q; }

  /// Throws FieldError on zero.
  FieldElement inverse() const;
  FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }
  FieldElement pow(long n) const;

  /// -1, 0 or +1 for the real value.
  int sign() const;
  FieldElement abs() const { return sign() < 0 ? -*this : *this; }

  /// Certified enclosure of width <= 2^-bits.
  RationalInterval embed(long bits) const;
  double to_double() const;

  /// Exact coefficient identity.
  friend bool operator==(const FieldElement& a, const FieldElement& b);
  /// Ordering of real values.
  friend std::strong_ordering compare(const FieldElement& a, const FieldElement& b);
  friend bool operator<(const FieldElement& a, const FieldElement& b) { return compare(a, b) < 0; }
  friend bool operator<=(const FieldElement& a, const FieldElement& b) { return compare(a, b) <= 0; }
  friend bool operator>(const FieldElement& a, const FieldElement& b) { return compare(a, b) > 0; }
  friend bool operator>=(const FieldElement& a, const FieldElement& b) { return compare(a, b) >= 0; }

  std::size_t hash() const;
  /// "c0 c1 ... c_{d-1}" with rationals in p/q form.
  std::string to_string() const;

 private:
  void check_same(const FieldElement& o) const;
  RationalInterval enclose_with(const std::vector<RationalInterval>& powers) const;

  FieldPtr field_;
  std::vector<mpq_class> coeffs_;
};

FieldElement min(const FieldElement& a, const FieldElement& b);
FieldElement max(const FieldElement& a, const FieldElement& b);

/// Parses "3", "-7/4" into a normalized rational. Throws on malformed input.
mpq_class parse_rational(const std::string& s);
std::string rational_to_string(const mpq_class& q);

}  // namespace wsc

template <>
struct std::hash<wsc::FieldElement> {
  std::size_t operator()(const wsc::FieldElement& x) const noexcept { return x.hash(); }
};
