#pragma once

// Weyl sums and discrepancy of the orbits s^k x mod 1 for mu-distributed x,
// and the arithmetic hypotheses (Pisot base, irrational log ratio) that the
// normality statement needs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsc/ifs.hpp"

namespace wsc {

class NormalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base s > 1: an integer, or the real root of a monic integer polynomial
/// inside a rational interval.
struct Base {
  std::optional<long> integer;
  std::vector<mpz_class> minpoly;  // low-to-high
  mpq_class lo, hi;

  static Base of_integer(long s);
  static Base algebraic(std::vector<mpz_class> minpoly, mpq_class lo, mpq_class hi);
  /// "2" or "poly:-1,-1,1@1,2" (coefficients low-to-high, then interval).
  static Base parse(const std::string& text);
  double value() const;
  std::string describe() const;
};

/// Number of roots of p (real coefficients, low-to-high) in the open disc
/// |z| < R, by the Schur-Cohn recursion. nullopt in the singular case where a
/// step's leading term vanishes: a root on the circle, but also e.g.
/// |p(0)| = |lead| R^deg. Callers retry with a nearby radius.
std::optional<int> schur_cohn_count(const QPoly& p, const mpq_class& R);

struct PisotCheck {
  bool pisot = false;
  std::string reason;
};
PisotCheck check_pisot(const Base& s);

struct RatioRelation {
  std::string ratio;             // the contraction ratio
  bool relation_found = false;   // log s / log rho = p/q found and confirmed
  long p = 0, q = 0;
  bool suspected = false;        // numerical match without exact confirmation
  bool decided = false;          // true when "no relation" is proven
  std::string method;
  long bound = 0;                // search bound when undecided
};

struct HypothesisReport {
  std::string base;
  PisotCheck pisot;
  std::vector<RatioRelation> ratios;
  bool irrational_ok() const;
  bool holds() const { return pisot.pisot && irrational_ok(); }
};

HypothesisReport hypothesis_check(const IFS& ifs, const Base& s, long search_bound = 64);

/// frac(s^k x) for k < K, where x ~ X / s^Q (X >= 0) and Q >= K.
std::vector<double> fractional_orbit(const mpz_class& X, long s, long Q, int K);

struct WeylRow {
  int m = 0;
  int K = 0;
  double mean_abs = 0.0;
  double sd_abs = 0.0;
};

struct DiscrepancyRow {
  int K = 0;
  double mean = 0.0;
};

struct NormalityReport {
  std::string base;
  int samples = 0;
  int depth = 0;        // symbols per sample point
  long precision = 0;   // base-s digits kept
  std::vector<WeylRow> weyl;
  std::vector<DiscrepancyRow> discrepancy;
  const WeylRow* find(int m, int K) const;
};

/// |1/K sum_k e(m u_k)| for every m in 1..M and horizon in `horizons`, and
/// the star discrepancy of u_0..u_{K-1}, averaged over the orbits.
NormalityReport weyl_from_orbits(const std::vector<std::vector<double>>& orbits, const std::vector<int>& horizons, int M);

struct WeylOptions {
  int samples = 64;
  std::vector<int> horizons{256, 1024, 4096};
  int frequencies = 4;
  std::uint64_t seed = 1;
  int guard_digits = 64;     // in bits
  int max_depth = 200000;    // exact-arithmetic budget for the sample words
};

/// x = phi_{i|L}(0) exactly, rounded once to Q base-s digits. Integer bases only.
NormalityReport weyl_sums(const IFS& ifs, const Base& s, const WeylOptions& opt);

double star_discrepancy(std::vector<double> u);

}  // namespace wsc
