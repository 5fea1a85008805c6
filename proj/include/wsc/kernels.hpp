#pragma once

// Numeric inner loops with a portable scalar reference and an AVX2 variant
// chosen at runtime. Results agree up to summation order.

#include <span>

namespace wsc::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool avx2_available();
/// Forces a backend (tests). Requesting avx2 on a machine without it keeps scalar.
void force_backend(Backend b);
const char* backend_name(Backend b);

/// x[i] = a * x[i] + b
void affine(std::span<double> x, double a, double b);
double sum(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
/// Total weight of points (x, y, z) within distance r of c; y, z may be empty
/// for lower dimension.
double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r);

namespace scalar {
void affine(std::span<double> x, double a, double b);
double sum(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r);
}  // namespace scalar

namespace avx2 {
void affine(std::span<double> x, double a, double b);
double sum(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r);
}  // namespace avx2

}  // namespace wsc::kernels
