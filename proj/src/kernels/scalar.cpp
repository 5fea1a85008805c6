#include <cmath>

#include "wsc/kernels.hpp"

namespace wsc::kernels::scalar {

void affine(std::span<double> x, double a, double b) {
  for (double& v : x) v = a * v + b;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r) {
  const double r2 = r * r;
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double d2 = (x[i] - c[0]) * (x[i] - c[0]);
    if (!y.empty()) d2 += (y[i] - c[1]) * (y[i] - c[1]);
    if (!z.empty()) d2 += (z[i] - c[2]) * (z[i] - c[2]);
    if (d2 <= r2) s += w[i];
  }
  return s;
}

}  // namespace wsc::kernels::scalar
