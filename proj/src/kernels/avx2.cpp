#include "wsc/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define WSC_HAVE_X86 1
#endif

namespace wsc::kernels::avx2 {

#ifdef WSC_HAVE_X86

namespace {
__attribute__((target("avx2"))) double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

__attribute__((target("avx2"))) void affine(std::span<double> x, double a, double b) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  double* p = x.data();
  for (; i + 4 <= x.size(); i += 4) _mm256_storeu_pd(p + i, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(p + i)), vb));
  for (; i < x.size(); ++i) p[i] = a * p[i] + b;
}

__attribute__((target("avx2"))) double sum(std::span<const double> x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double s = hsum(acc);
  for (; i < x.size(); ++i) s += x[i];
  return s;
}

__attribute__((target("avx2"))) double l1_distance(std::span<const double> a, std::span<const double> b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double s = hsum(acc);
  for (; i < a.size(); ++i) s += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return s;
}

__attribute__((target("avx2"))) double ball_mass(std::span<const double> x, std::span<const double> y,
                                                 std::span<const double> z, std::span<const double> w, const double c[3],
                                                 double r) {
  const __m256d r2 = _mm256_set1_pd(r * r);
  const __m256d cx = _mm256_set1_pd(c[0]), cy = _mm256_set1_pd(c[1]), cz = _mm256_set1_pd(c[2]);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = w.size();
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), cx);
    __m256d d2 = _mm256_mul_pd(d, d);
    if (!y.empty()) {
      d = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), cy);
      d2 = _mm256_add_pd(d2, _mm256_mul_pd(d, d));
    }
    if (!z.empty()) {
      d = _mm256_sub_pd(_mm256_loadu_pd(z.data() + i), cz);
      d2 = _mm256_add_pd(d2, _mm256_mul_pd(d, d));
    }
    const __m256d mask = _mm256_cmp_pd(d2, r2, _CMP_LE_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(w.data() + i)));
  }
  double s = hsum(acc);
  const double rr = r * r;
  for (; i < n; ++i) {
    double d2 = (x[i] - c[0]) * (x[i] - c[0]);
    if (!y.empty()) d2 += (y[i] - c[1]) * (y[i] - c[1]);
    if (!z.empty()) d2 += (z[i] - c[2]) * (z[i] - c[2]);
    if (d2 <= rr) s += w[i];
  }
  return s;
}

#else

void affine(std::span<double> x, double a, double b) { scalar::affine(x, a, b); }
double sum(std::span<const double> x) { return scalar::sum(x); }
double l1_distance(std::span<const double> a, std::span<const double> b) { return scalar::l1_distance(a, b); }
double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r) {
  return scalar::ball_mass(x, y, z, w, c, r);
}

#endif

}  // namespace wsc::kernels::avx2
