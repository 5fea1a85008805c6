#include "wsc/normality.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace wsc {

namespace {

long log2_height(const mpq_class& q) {
  const long a = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
  const long b = static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  return std::max(a, b);
}

mpq_class qpow(const mpq_class& b, long n) {
  mpq_class r(1), x = b;
  if (n < 0) {
    x = 1 / x;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) r *= x;
    n >>= 1;
    if (n) x *= x;
  }
  return r;
}

// Determinant of the multiplication-by-a matrix in the power basis.
mpq_class field_norm(const FieldElement& a) {
  const FieldPtr& f = a.field();
  const int d = f->degree();
  std::vector<std::vector<mpq_class>> m(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d)));
  FieldElement basis = FieldElement::one(f);
  const FieldElement theta = d > 1 ? FieldElement::generator(f) : FieldElement::one(f);
  for (int j = 0; j < d; ++j) {
    const FieldElement col = a * basis;
    for (int i = 0; i < d; ++i)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<std::size_t>(i) < col.coeffs().size() ? col.coeffs()[static_cast<std::size_t>(i)] : mpq_class(0);
    basis *= theta;
  }
  mpq_class det(1);
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int r = c; r < d; ++r)
      if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(c)]);
      det = -det;
    }
    const mpq_class p = m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    det *= p;
    for (int r = c + 1; r < d; ++r) {
      const mpq_class factor = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / p;
      if (factor == 0) continue;
      for (int k = c; k < d; ++k)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= factor * m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
    }
  }
  return det;
}

}  // namespace

// ---------------------------------------------------------------------------
// Base

Base Base::of_integer(long s) {
  if (s < 2) throw NormalityError("integer base must be >= 2");
  Base b;
  b.integer = s;
  return b;
}

Base Base::algebraic(std::vector<mpz_class> minpoly, mpq_class lo, mpq_class hi) {
  if (minpoly.size() < 2) throw NormalityError("base polynomial must have degree >= 1");
  if (minpoly.back() != 1) throw NormalityError("base polynomial must be monic");
  if (minpoly.size() == 2) {
    // x - c: an integer base in disguise.
    const mpz_class c = -minpoly[0];
    if (!c.fits_slong_p()) throw NormalityError("integer base out of range");
    return of_integer(c.get_si());
  }
  Base b;
  b.minpoly = std::move(minpoly);
  b.lo = std::move(lo);
  b.hi = std::move(hi);
  AlgebraicField::create(b.minpoly, b.lo, b.hi);  // validates the isolating interval
  return b;
}

Base Base::parse(const std::string& text) {
  if (text.rfind("poly:", 0) != 0) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(text, &used);
    } catch (const std::exception&) {
      throw NormalityError("cannot parse base '" + text + "'");
    }
    if (used != text.size()) throw NormalityError("cannot parse base '" + text + "'");
    return of_integer(v);
  }
  const std::string body = text.substr(5);
  const auto at = body.find('@');
  if (at == std::string::npos) throw NormalityError("algebraic base needs 'poly:c0,c1,...@lo,hi'");
  std::vector<mpz_class> coeffs;
  std::stringstream cs(body.substr(0, at));
  std::string tok;
  while (std::getline(cs, tok, ',')) coeffs.emplace_back(tok);
  std::stringstream is(body.substr(at + 1));
  std::string lo, hi;
  if (!std::getline(is, lo, ',') || !std::getline(is, hi)) throw NormalityError("algebraic base needs an interval lo,hi");
  return algebraic(std::move(coeffs), parse_rational(lo), parse_rational(hi));
}

double Base::value() const {
  if (integer) return static_cast<double>(*integer);
  return FieldElement::generator(AlgebraicField::create(minpoly, lo, hi)).to_double();
}

std::string Base::describe() const {
  if (integer) return std::to_string(*integer);
  std::ostringstream os;
  os << "root of [";
  for (std::size_t i = 0; i < minpoly.size(); ++i) os << (i ? " " : "") << minpoly[i].get_str();
  os << "] in [" << rational_to_string(lo) << ", " << rational_to_string(hi) << "]";
  return os.str();
}

// ---------------------------------------------------------------------------
// Pisot test

std::optional<int> schur_cohn_count(const QPoly& p_in, const mpq_class& R) {
  QPoly p = p_in;
  poly::trim(p);
  int n = poly::degree(p);
  if (n < 0) return std::nullopt;
  mpq_class rk(1);
  for (int k = 0; k <= n; ++k) {
    p[static_cast<std::size_t>(k)] *= rk;
    rk *= R;
  }
  // Marden: with delta_k = (T^k p)(0) all nonzero, the number of zeros inside
  // the unit circle is the number of negative products delta_1 ... delta_k.
  int inside = 0;
  int sign_product = 1;
  for (int deg = n; deg >= 1; --deg) {
    const mpq_class a0 = p[0], an = p[static_cast<std::size_t>(deg)];
    QPoly t(static_cast<std::size_t>(deg));
    for (int k = 0; k < deg; ++k)
      t[static_cast<std::size_t>(k)] = a0 * p[static_cast<std::size_t>(k)] - an * p[static_cast<std::size_t>(deg - k)];
    const mpq_class delta = t[0];
    if (delta == 0) return std::nullopt;
    sign_product *= delta > 0 ? 1 : -1;
    if (sign_product < 0) ++inside;
    p = std::move(t);
  }
  return inside;
}

PisotCheck check_pisot(const Base& s) {
  PisotCheck c;
  if (s.integer) {
    c.pisot = *s.integer >= 2;
    c.reason = c.pisot ? "integer >= 2" : "integer < 2";
    return c;
  }
  const FieldPtr f = AlgebraicField::create(s.minpoly, s.lo, s.hi);
  if (FieldElement::generator(f) <= FieldElement::one(f)) {
    c.reason = "root is not > 1";
    return c;
  }
  const int d = f->degree();
  const QPoly& p = f->minpoly_q();
  for (int e = 8; e <= 128; e *= 2) {
    const mpq_class eps = mpq_class(1) / (mpz_class(1) << e);
    const auto in = schur_cohn_count(p, 1 - eps);
    const auto out = schur_cohn_count(p, 1 + eps);
    if (in && *in == d - 1) {
      c.pisot = true;
      c.reason = "Schur-Cohn: " + std::to_string(d - 1) + " conjugates in |z| < 1 - 2^-" + std::to_string(e);
      return c;
    }
    if (out && *out < d - 1) {
      c.reason = "Schur-Cohn: a conjugate has modulus > 1 + 2^-" + std::to_string(e);
      return c;
    }
  }
  c.reason = "undecided: no radius 1 +- 2^-e (e = 8..128) gave a regular Schur-Cohn count; a conjugate may lie on the unit circle";
  return c;
}

// ---------------------------------------------------------------------------
// Rational relations log s / log rho = p / q, i.e. s^q = rho^p with p < 0.

bool HypothesisReport::irrational_ok() const {
  return std::none_of(ratios.begin(), ratios.end(), [](const RatioRelation& r) { return r.relation_found || r.suspected; });
}

HypothesisReport hypothesis_check(const IFS& ifs, const Base& s, long search_bound) {
  HypothesisReport rep;
  rep.base = s.describe();
  rep.pisot = check_pisot(s);
  const double log_s = std::log(s.value());

  std::vector<FieldElement> seen;
  for (const Similarity& g : ifs.maps()) {
    const FieldElement& rho = g.ratio;
    if (std::find(seen.begin(), seen.end(), rho) != seen.end()) continue;
    seen.push_back(rho);
    RatioRelation rr;
    rr.ratio = rho.to_string();
    const double log_rho = std::log(rho.to_double());

    auto candidates = [&](long bound, auto&& confirm) {
      for (long q = 1; q <= bound && !rr.relation_found; ++q)
        for (long p = -1; p >= -bound; --p) {
          if (std::fabs(q * log_s - p * log_rho) > 1e-6 * static_cast<double>(q)) continue;
          if (confirm(p, q)) {
            rr.relation_found = true;
            rr.p = p;
            rr.q = q;
            break;
          }
        }
    };

    if (s.integer && rho.is_rational()) {
      // Both rational: any relation comes from a common base c with height >= 2,
      // so exponents are bounded by the bit heights.
      const mpq_class sv(*s.integer), rv = rho.rational_part();
      rr.bound = log2_height(sv) + log2_height(rv) + 1;
      candidates(rr.bound, [&](long p, long q) { return qpow(sv, q) == qpow(rv, p); });
      rr.decided = true;
      rr.method = "exact over Q (complete height bound " + std::to_string(rr.bound) + ")";
    } else if (s.integer) {
      // s^q = rho^p forces s^(d q) = N(rho)^p.
      const mpq_class n = field_norm(rho);
      if (abs(n) == 1) {
        rr.decided = true;
        rr.method = "norm: rho is a unit, s^q is not";
      } else {
        rr.bound = search_bound;
        const FieldElement sv = FieldElement::rational(rho.field(), mpq_class(*s.integer));
        candidates(rr.bound, [&](long p, long q) { return sv.pow(q) == rho.pow(p); });
        rr.method = "bounded exact search";
      }
    } else {
      // s^1 = rho^p is confirmed exactly when rho^p is a root of the base
      // polynomial with the right value; other matches stay suspected.
      rr.bound = search_bound;
      const FieldPtr& f = rho.field();
      candidates(rr.bound, [&](long p, long q) {
        if (q != 1) {
          rr.suspected = true;
          rr.p = p;
          rr.q = q;
          return false;
        }
        const FieldElement e = rho.pow(p);
        FieldElement acc = FieldElement::zero(f);
        for (auto it = s.minpoly.rbegin(); it != s.minpoly.rend(); ++it) acc = acc * e + FieldElement::rational(f, mpq_class(*it));
        if (acc.is_zero() && std::fabs(e.to_double() - s.value()) < 1e-9) return true;
        rr.suspected = true;
        rr.p = p;
        rr.q = q;
        return false;
      });
      rr.method = "bounded search, exact for q = 1";
      if (rr.relation_found) rr.suspected = false;
    }
    if (rr.suspected) rr.method += ": numerical relation " + std::to_string(rr.p) + "/" + std::to_string(rr.q) + " not confirmed";
    else if (!rr.relation_found && !rr.decided) rr.method += ": no rational relation found up to denominator " + std::to_string(rr.bound);
    if (rr.relation_found) rr.decided = true;
    rep.ratios.push_back(rr);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Weyl sums

std::vector<double> fractional_orbit(const mpz_class& X, long s, long Q, int K) {
  if (Q < K) throw NormalityError("fractional_orbit: precision below the horizon");
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(K));
  mpz_class modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), static_cast<unsigned long>(s), static_cast<unsigned long>(Q));
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), X.get_mpz_t(), modulus.get_mpz_t());
  mpz_class scaled;
  for (int k = 0; k < K; ++k) {
    // u_k = r / modulus with r = X mod s^(Q-k).
    scaled = r << 53;
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), modulus.get_mpz_t());
    u.push_back(std::ldexp(scaled.get_d(), -53));
    mpz_divexact_ui(modulus.get_mpz_t(), modulus.get_mpz_t(), static_cast<unsigned long>(s));
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  }
  return u;
}

double star_discrepancy(std::vector<double> u) {
  if (u.empty()) return 0.0;
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    d = std::max(d, static_cast<double>(j + 1) / n - u[j]);
    d = std::max(d, u[j] - static_cast<double>(j) / n);
  }
  return std::min(d, 1.0);
}

const WeylRow* NormalityReport::find(int m, int K) const {
  for (const WeylRow& r : weyl)
    if (r.m == m && r.K == K) return &r;
  return nullptr;
}

NormalityReport weyl_from_orbits(const std::vector<std::vector<double>>& orbits, const std::vector<int>& horizons, int M) {
  NormalityReport rep;
  rep.samples = static_cast<int>(orbits.size());
  if (orbits.empty()) throw NormalityError("weyl_from_orbits: no orbits");
  for (int K : horizons)
    for (const auto& o : orbits)
      if (static_cast<int>(o.size()) < K || K < 1) throw NormalityError("weyl_from_orbits: orbit shorter than a horizon");
  for (int m = 1; m <= M; ++m)
    for (int K : horizons) {
      std::vector<double> mags;
      for (const auto& o : orbits) {
        double re = 0.0, im = 0.0;
        for (int k = 0; k < K; ++k) {
          // Reduce m u mod 1 before the trigonometric call.
          const double a = m * o[static_cast<std::size_t>(k)];
          const double ph = 2.0 * std::numbers::pi * (a - std::floor(a));
          re += std::cos(ph);
          im += std::sin(ph);
        }
        mags.push_back(std::min(1.0, std::hypot(re, im) / K));
      }
      WeylRow row{m, K, 0.0, 0.0};
      for (double v : mags) row.mean_abs += v;
      row.mean_abs /= static_cast<double>(mags.size());
      if (mags.size() > 1) {
        for (double v : mags) row.sd_abs += (v - row.mean_abs) * (v - row.mean_abs);
        row.sd_abs = std::sqrt(row.sd_abs / static_cast<double>(mags.size() - 1));
      }
      rep.weyl.push_back(row);
    }
  for (int K : horizons) {
    double acc = 0.0;
    for (const auto& o : orbits) acc += star_discrepancy(std::vector<double>(o.begin(), o.begin() + K));
    rep.discrepancy.push_back({K, acc / static_cast<double>(orbits.size())});
  }
  return rep;
}

NormalityReport weyl_sums(const IFS& ifs, const Base& s, const WeylOptions& opt) {
  if (ifs.dim() != 1) throw NormalityError("weyl_sums: one-dimensional systems only");
  if (!s.integer) throw NormalityError("weyl_sums: exact orbits are implemented for integer bases; use hypothesis_check for algebraic bases");
  if (opt.samples < 1 || opt.horizons.empty() || opt.frequencies < 1) throw NormalityError("weyl_sums: empty request");
  const long base = *s.integer;
  const int K = *std::max_element(opt.horizons.begin(), opt.horizons.end());
  const double log2s = std::log2(static_cast<double>(base));
  const long Q = K + static_cast<long>(std::ceil(opt.guard_digits / log2s));
  const long bits = static_cast<long>(std::ceil(static_cast<double>(Q) * log2s)) + 8;
  // rho_max^L times the raw diameter must stay below s^-Q.
  const Similarity back = ifs.normalization().inverse();
  const double raw_scale = back.ratio.to_double();
  const double need = static_cast<double>(Q) * std::log(static_cast<double>(base)) + std::log(std::max(raw_scale, 1e-300)) + 4.0;
  const long L = static_cast<long>(std::ceil(need / -std::log(ifs.ratio_max()))) + 8;
  if (L > opt.max_depth) {
    std::ostringstream os;
    os << "weyl_sums: precision shortfall; samples need depth " << L << " > budget " << opt.max_depth
       << " (raise --max-depth or lower the horizon)";
    throw NormalityError(os.str());
  }
  std::vector<std::vector<double>> orbits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(Q));
  for (int j = 0; j < opt.samples; ++j) {
    const Word w = sample_word(ifs, static_cast<std::size_t>(L), derive_seed(opt.seed, static_cast<std::uint64_t>(j)));
    // Horner from the tail: x = t_{w0} + r_{w0} (t_{w1} + ...).
    FieldElement x = FieldElement::zero(ifs.field());
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      const Similarity& g = ifs.map(*it);
      x = g.ratio * x + g.translation[0];
    }
    const FieldElement raw = back.ratio * x + back.translation[0];
    const RationalInterval iv = raw.embed(bits);
    mpq_class lo = iv.lo * scale;
    mpz_class X;
    mpz_fdiv_q(X.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    orbits.push_back(fractional_orbit(X, base, Q, K));
  }
  NormalityReport rep = weyl_from_orbits(orbits, opt.horizons, opt.frequencies);
  rep.base = s.describe();
  rep.depth = static_cast<int>(L);
  rep.precision = Q;
  return rep;
}

}  // namespace wsc
