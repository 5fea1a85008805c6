#include <atomic>

#include "wsc/kernels.hpp"

namespace wsc::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

namespace {
std::atomic<Backend>& current() {
  static std::atomic<Backend> b{avx2_available() ? Backend::avx2 : Backend::scalar};
  return b;
}
}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  current().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void affine(std::span<double> x, double a, double b) {
  if (active_backend() == Backend::avx2) avx2::affine(x, a, b);
  else scalar::affine(x, a, b);
}

double sum(std::span<const double> x) {
  return active_backend() == Backend::avx2 ? avx2::sum(x) : scalar::sum(x);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active_backend() == Backend::avx2 ? avx2::l1_distance(a, b) : scalar::l1_distance(a, b);
}

double ball_mass(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> w, const double c[3], double r) {
  return active_backend() == Backend::avx2 ? avx2::ball_mass(x, y, z, w, c, r) : scalar::ball_mass(x, y, z, w, c, r);
}

}  // namespace wsc::kernels
