#include "wsc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsc {

// Successive shortest paths on the complete bipartite graph. Dijkstra runs on
// reduced costs c_ij - u_i - v_j (kept >= 0 by the potentials); residual
// backward arcs exist wherever flow is positive.
TransportResult solve_transport(std::span<const double> a, std::span<const double> b, std::span<const double> cost) {
  const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
  if (cost.size() != a.size() * b.size()) throw std::invalid_argument("transport: cost matrix shape mismatch");
  TransportResult result;
  if (n == 0 || m == 0) return result;

  double ta = 0.0, tb = 0.0;
  for (double x : a) ta += std::max(x, 0.0);
  for (double x : b) tb += std::max(x, 0.0);
  if (ta <= 0.0 || tb <= 0.0) return result;
  const double total = 0.5 * (ta + tb);
  std::vector<double> supply(static_cast<std::size_t>(n)), demand(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) supply[static_cast<std::size_t>(i)] = std::max(a[static_cast<std::size_t>(i)], 0.0) * total / ta;
  for (int j = 0; j < m; ++j) demand[static_cast<std::size_t>(j)] = std::max(b[static_cast<std::size_t>(j)], 0.0) * total / tb;
  const double eps = total * 1e-13;

  auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)]; };
  std::vector<double> flow(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0.0);
  auto f = [&](int i, int j) -> double& { return flow[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)]; };

  std::vector<double> u(static_cast<std::size_t>(n), 0.0), v(static_cast<std::size_t>(m), 0.0);
  // v_j = min_i c_ij keeps every reduced cost nonnegative at the start.
  for (int j = 0; j < m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) best = std::min(best, c(i, j));
    v[static_cast<std::size_t>(j)] = best;
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dr(static_cast<std::size_t>(n)), dc(static_cast<std::size_t>(m));
  std::vector<int> pred_col(static_cast<std::size_t>(n)), pred_row(static_cast<std::size_t>(m));
  std::vector<char> done_r(static_cast<std::size_t>(n)), done_c(static_cast<std::size_t>(m));

  double remaining = 0.0;
  for (double s : supply) remaining += s;
  remaining = std::min(remaining, [&] { double t = 0; for (double d : demand) t += d; return t; }());

  int guard = 0;
  const int guard_max = 50 * (n + m) + 1000;
  while (remaining > eps) {
    if (++guard > guard_max) throw std::runtime_error("transport: augmentation limit reached");
    std::fill(dr.begin(), dr.end(), inf);
    std::fill(dc.begin(), dc.end(), inf);
    std::fill(done_r.begin(), done_r.end(), 0);
    std::fill(done_c.begin(), done_c.end(), 0);
    for (int i = 0; i < n; ++i)
      if (supply[static_cast<std::size_t>(i)] > eps) {
        dr[static_cast<std::size_t>(i)] = 0.0;
        pred_col[static_cast<std::size_t>(i)] = -1;
      }
    int sink = -1;
    // Dense Dijkstra over rows and columns.
    for (;;) {
      int bi = -1, bj = -1;
      double best = inf;
      for (int i = 0; i < n; ++i)
        if (!done_r[static_cast<std::size_t>(i)] && dr[static_cast<std::size_t>(i)] < best) best = dr[static_cast<std::size_t>(i)], bi = i, bj = -1;
      for (int j = 0; j < m; ++j)
        if (!done_c[static_cast<std::size_t>(j)] && dc[static_cast<std::size_t>(j)] < best) best = dc[static_cast<std::size_t>(j)], bj = j, bi = -1;
      if (bi < 0 && bj < 0) break;
      if (bi >= 0) {
        done_r[static_cast<std::size_t>(bi)] = 1;
        for (int j = 0; j < m; ++j) {
          if (done_c[static_cast<std::size_t>(j)]) continue;
          const double rc = std::max(0.0, c(bi, j) - u[static_cast<std::size_t>(bi)] - v[static_cast<std::size_t>(j)]);
          if (best + rc < dc[static_cast<std::size_t>(j)]) {
            dc[static_cast<std::size_t>(j)] = best + rc;
            pred_row[static_cast<std::size_t>(j)] = bi;
          }
        }
      } else {
        done_c[static_cast<std::size_t>(bj)] = 1;
        if (demand[static_cast<std::size_t>(bj)] > eps) {
          sink = bj;
          break;
        }
        for (int i = 0; i < n; ++i) {
          if (done_r[static_cast<std::size_t>(i)] || f(i, bj) <= eps) continue;
          const double rc = std::max(0.0, u[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(bj)] - c(i, bj));
          if (best + rc < dr[static_cast<std::size_t>(i)]) {
            dr[static_cast<std::size_t>(i)] = best + rc;
            pred_col[static_cast<std::size_t>(i)] = bj;
          }
        }
      }
    }
    if (sink < 0) throw std::runtime_error("transport: no augmenting path");
    const double dsink = dc[static_cast<std::size_t>(sink)];
    // Potential update keeps reduced costs nonnegative on the residual graph.
    for (int i = 0; i < n; ++i)
      if (dr[static_cast<std::size_t>(i)] < dsink) u[static_cast<std::size_t>(i)] += dsink - dr[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j)
      if (dc[static_cast<std::size_t>(j)] < dsink) v[static_cast<std::size_t>(j)] -= dsink - dc[static_cast<std::size_t>(j)];

    double delta = demand[static_cast<std::size_t>(sink)];
    int j = sink, src = -1;
    while (true) {
      const int i = pred_row[static_cast<std::size_t>(j)];
      const int pj = pred_col[static_cast<std::size_t>(i)];
      if (pj < 0) {
        src = i;
        break;
      }
      delta = std::min(delta, f(i, pj));
      j = pj;
    }
    delta = std::min(delta, supply[static_cast<std::size_t>(src)]);
    j = sink;
    while (true) {
      const int i = pred_row[static_cast<std::size_t>(j)];
      f(i, j) += delta;
      const int pj = pred_col[static_cast<std::size_t>(i)];
      if (pj < 0) break;
      f(i, pj) -= delta;
      if (f(i, pj) < eps * 1e-3) f(i, pj) = 0.0;
      j = pj;
    }
    supply[static_cast<std::size_t>(src)] -= delta;
    demand[static_cast<std::size_t>(sink)] -= delta;
    remaining -= delta;
    ++result.augmentations;
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (f(i, j) > 0.0) {
        result.cost += f(i, j) * c(i, j);
        result.plan.push_back({i, j, f(i, j)});
      }
  return result;
}

}  // namespace wsc
