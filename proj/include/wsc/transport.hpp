#pragma once

// Exact discrete optimal transport between two finite mass vectors.

#include <span>
#include <vector>

namespace wsc {

struct TransportResult {
  double cost = 0.0;
  int augmentations = 0;
  /// (row, col, mass) triples with positive mass.
  struct Flow {
    int row, col;
    double mass;
  };
  std::vector<Flow> plan;
};

/// Minimum of sum c_ij P_ij over couplings P of a and b. `cost` is row-major
/// a.size() x b.size(), entries >= 0. Both mass vectors are rescaled to the
/// mean of their totals before solving.
TransportResult solve_transport(std::span<const double> a, std::span<const double> b, std::span<const double> cost);

}  // namespace wsc
