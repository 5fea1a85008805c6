#pragma once

// Finite atomic approximations of self-similar measures and of the weighted
// sums built from them, zooms, and distances between normalized measures.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wsc/ifs.hpp"
#include "wsc/neighbourhood.hpp"

namespace wsc {

using Vec3 = std::array<double, 3>;

class MeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasureMeta {
  int depth = 0;                // symbolic levels below the coarsest piece
  double finest_ratio = 1.0;  // largest atom-cell ratio, in the measure's own coordinates
  std::string provenance;
};

/// Atoms as structure-of-arrays. Unused coordinates stay empty.
struct AtomicMeasure {
  int dim = 1;
  std::array<std::vector<double>, 3> coord;
  std::vector<double> weight;
  std::vector<int> tag;  // optional branch index per atom (empty if unused)
  MeasureMeta meta;

  std::size_t size() const { return weight.size(); }
  double total_mass() const;
  Vec3 point(std::size_t i) const;
  void push(const Vec3& x, double w, int t = -1);
  AtomicMeasure normalized() const;
};

/// Atoms phi_a(0) with weight p_a for all a in Gamma^n.
AtomicMeasure approx_measure(const IFS& ifs, int depth, std::size_t atom_cap = std::size_t{1} << 22);
/// Equal-weight atoms phi_a(0) for sampled words of the given length.
AtomicMeasure approx_measure_mc(const IFS& ifs, int depth, std::size_t atoms, std::uint64_t seed);

AtomicMeasure push_forward(const FloatMap& f, const AtomicMeasure& m);
AtomicMeasure push_forward(const Similarity& f, const AtomicMeasure& m);

/// nu = sum over f in N0 of f mu, tagged with the index of f.
AtomicMeasure build_reference_nu(const IFS& ifs, const NeighbourhoodSystem& n0, int depth);

/// Mass of m in the closed ball B(c, r).
double ball_mass(const AtomicMeasure& m, const Vec3& c, double r);

/// Normalized restriction of S_t T_x m to B(0,1). Throws unless
/// meta.finest_ratio <= e^-t / min_resolution.
AtomicMeasure zoom(const AtomicMeasure& m, const Vec3& x, double t, double min_resolution = 8.0);

/// Weighted sums of exact relative maps differ only by their components.
struct Component {
  FloatMap map;
  double weight = 0.0;
};

struct DepthPolicy {
  double refine = 8.0;  // leaf pieces are at least this much smaller than the window
  int extra_levels = 6;  // levels refined beyond the minimum
};

/// Atoms of sum_c w_c (g_c mu) inside B(x, e^-t) (and inside the clip ball when
/// clip_radius > 0), mapped by y -> e^t (y - x). Not normalized.
AtomicMeasure local_window(const IFS& ifs, std::span<const Component> comps, const Vec3& x, double t,
                           const DepthPolicy& policy, double clip_radius = 0.0);

/// Cell grid over [-1,1]^d with `resolution` cells per unit length.
struct GridDensity {
  int dim = 1;
  int resolution = 0;
  std::vector<double> values;
  std::vector<bool> empty;  // cells with no reference mass (density grids only)

  int cells_per_axis() const { return 2 * resolution; }
  double sum() const;
};

GridDensity render_grid(const AtomicMeasure& m, int resolution);

enum class DistanceKind { w1, tv_grid };
double measure_distance(DistanceKind kind, const AtomicMeasure& a, const AtomicMeasure& b, int resolution = 32);

/// Exact W1 between atomic measures on the line (both normalized).
double w1_line(const AtomicMeasure& a, const AtomicMeasure& b);
/// W1 in d >= 2 after snapping atoms to cell centres at the given resolution;
/// the error is at most one cell diagonal.
double w1_quantized(const AtomicMeasure& a, const AtomicMeasure& b, int resolution);
double tv_grid(const AtomicMeasure& a, const AtomicMeasure& b, int resolution);

/// A measure on the line prepared for repeated W1 evaluations.
struct SortedLine {
  std::vector<double> x;
  std::vector<double> cdf;  // cumulative mass up to and including x[i]
};
SortedLine sort_line(const AtomicMeasure& m);
double w1_sorted(const SortedLine& a, const SortedLine& b);

/// Per-cell Radon-Nikodym ratio of sum_f coef[h][f] (f mu)|B(0,1) to nu.
GridDensity zeta_density(const AtomicMeasure& nu, std::span<const double> coef_row, int resolution);

/// Grid of (sum_h q_h zeta_h) d nu restricted to B(0,1), normalized.
GridDensity reconstruct_from_zeta(const AtomicMeasure& nu, std::span<const GridDensity> zetas, std::span<const double> q,
                                  int resolution);

/// L1 distance of two grids of equal shape.
double grid_l1(const GridDensity& a, const GridDensity& b);

/// Text export: a header of '#' lines then "x [y [z]] weight" rows.
std::string export_measure(const AtomicMeasure& m);
AtomicMeasure import_measure(const std::string& text);
std::string export_grid(const GridDensity& g);

}  // namespace wsc
