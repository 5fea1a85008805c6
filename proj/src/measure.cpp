#include "wsc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "wsc/kernels.hpp"
#include "wsc/transport.hpp"

namespace wsc {

namespace {

std::span<const double> axis(const AtomicMeasure& m, int k) {
  if (k >= m.dim) return {};
  return m.coord[static_cast<std::size_t>(k)];
}

struct FloatHull {
  Vec3 lo{0, 0, 0}, hi{0, 0, 0};
};

FloatHull float_hull(const IFS& ifs) {
  FloatHull h;
  for (int k = 0; k < ifs.dim(); ++k) {
    h.lo[static_cast<std::size_t>(k)] = ifs.hull().lo[static_cast<std::size_t>(k)].to_double();
    h.hi[static_cast<std::size_t>(k)] = ifs.hull().hi[static_cast<std::size_t>(k)].to_double();
  }
  return h;
}

// Squared distance from c to the box ratio*hull + t.
double box_dist2(const FloatHull& h, int dim, double ratio, const Vec3& t, const Vec3& c) {
  double d2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double lo = ratio * h.lo[kk] + t[kk], hi = ratio * h.hi[kk] + t[kk];
    const double d = c[kk] < lo ? lo - c[kk] : (c[kk] > hi ? c[kk] - hi : 0.0);
    d2 += d * d;
  }
  return d2;
}

double dist2(const Vec3& a, const Vec3& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) * (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
  return s;
}

constexpr double kBallSlack = 1e-12;

AtomicMeasure empty_like(int dim) {
  AtomicMeasure m;
  m.dim = dim;
  return m;
}

}  // namespace

double AtomicMeasure::total_mass() const { return kernels::sum(weight); }

Vec3 AtomicMeasure::point(std::size_t i) const {
  Vec3 p{0, 0, 0};
  for (int k = 0; k < dim; ++k) p[static_cast<std::size_t>(k)] = coord[static_cast<std::size_t>(k)][i];
  return p;
}

void AtomicMeasure::push(const Vec3& x, double w, int t) {
  for (int k = 0; k < dim; ++k) coord[static_cast<std::size_t>(k)].push_back(x[static_cast<std::size_t>(k)]);
  weight.push_back(w);
  if (t >= 0 || !tag.empty()) {
    if (tag.size() + 1 < weight.size()) tag.resize(weight.size() - 1, -1);
    tag.push_back(t);
  }
}

AtomicMeasure AtomicMeasure::normalized() const {
  const double total = total_mass();
  if (!(total > 0.0)) throw MeasureError("cannot normalize a measure of zero mass");
  AtomicMeasure out = *this;
  for (double& w : out.weight) w /= total;
  return out;
}

AtomicMeasure approx_measure(const IFS& ifs, int depth, std::size_t atom_cap) {
  if (depth < 1) throw MeasureError("approx_measure: depth must be >= 1");
  const double count = std::pow(static_cast<double>(ifs.size()), depth);
  if (count > static_cast<double>(atom_cap)) {
    std::ostringstream os;
    os << "approx_measure: " << ifs.size() << "^" << depth << " atoms exceed the cap of " << atom_cap
       << "; lower the depth or use the Monte Carlo mode (approx_measure_mc / --mc-atoms)";
    throw MeasureError(os.str());
  }
  const int dim = ifs.dim();
  const auto& fm = ifs.float_maps();
  const auto& p = ifs.probs_double();
  struct Piece {
    double ratio;
    Vec3 t;
    double w;
  };
  std::vector<Piece> level{{1.0, {0, 0, 0}, 1.0}}, next;
  for (int n = 0; n < depth; ++n) {
    next.clear();
    next.reserve(level.size() * fm.size());
    for (const Piece& q : level)
      for (std::size_t j = 0; j < fm.size(); ++j) {
        Piece c{q.ratio * fm[j].ratio, q.t, q.w * p[j]};
        for (int k = 0; k < dim; ++k) c.t[static_cast<std::size_t>(k)] += q.ratio * fm[j].translation[static_cast<std::size_t>(k)];
        next.push_back(c);
      }
    level.swap(next);
  }
  AtomicMeasure m = empty_like(dim);
  m.weight.reserve(level.size());
  for (const Piece& q : level) m.push(q.t, q.w);
  m.meta.depth = depth;
  m.meta.finest_ratio = std::pow(ifs.ratio_max(), depth);
  m.meta.provenance = "mu depth=" + std::to_string(depth);
  return m;
}

AtomicMeasure approx_measure_mc(const IFS& ifs, int depth, std::size_t atoms, std::uint64_t seed) {
  if (depth < 1 || atoms < 1) throw MeasureError("approx_measure_mc: depth and atom count must be >= 1");
  WordSampler sampler(ifs, seed);
  AtomicMeasure m = empty_like(ifs.dim());
  const double w = 1.0 / static_cast<double>(atoms);
  for (std::size_t i = 0; i < atoms; ++i) {
    const Word a = sampler.sample(static_cast<std::size_t>(depth));
    m.push(project_point_double(ifs, a), w);
  }
  m.meta.depth = depth;
  m.meta.finest_ratio = std::pow(ifs.ratio_max(), depth);
  m.meta.provenance = "mu-mc depth=" + std::to_string(depth) + " atoms=" + std::to_string(atoms) + " seed=" + std::to_string(seed);
  return m;
}

AtomicMeasure push_forward(const FloatMap& f, const AtomicMeasure& m) {
  AtomicMeasure out = m;
  for (int k = 0; k < m.dim; ++k) kernels::affine(out.coord[static_cast<std::size_t>(k)], f.ratio, f.translation[static_cast<std::size_t>(k)]);
  out.meta.finest_ratio = m.meta.finest_ratio * f.ratio;
  return out;
}

AtomicMeasure push_forward(const Similarity& f, const AtomicMeasure& m) { return push_forward(to_float(f), m); }

AtomicMeasure build_reference_nu(const IFS& ifs, const NeighbourhoodSystem& n0, int depth) {
  const AtomicMeasure mu = approx_measure(ifs, depth);
  AtomicMeasure nu = empty_like(ifs.dim());
  double finest = 0.0;
  std::ostringstream prov;
  prov << "nu depth=" << depth << " branches=";
  for (int f = 0; f < n0.size(); ++f) {
    const AtomicMeasure part = push_forward(n0.maps[static_cast<std::size_t>(f)], mu);
    for (std::size_t i = 0; i < part.size(); ++i) nu.push(part.point(i), part.weight[i], f);
    finest = std::max(finest, part.meta.finest_ratio);
    prov << (f ? ";" : "") << n0.maps[static_cast<std::size_t>(f)].to_string();
  }
  nu.meta.depth = depth;
  nu.meta.finest_ratio = finest;
  nu.meta.provenance = prov.str();
  return nu;
}

double ball_mass(const AtomicMeasure& m, const Vec3& c, double r) {
  return kernels::ball_mass(axis(m, 0), axis(m, 1), axis(m, 2), m.weight, c.data(), r);
}

AtomicMeasure zoom(const AtomicMeasure& m, const Vec3& x, double t, double min_resolution) {
  const double radius = std::exp(-t);
  if (m.meta.finest_ratio > radius / min_resolution) {
    std::ostringstream os;
    os << "zoom: measure resolves ratio " << m.meta.finest_ratio << " but scale t=" << t << " needs <= "
       << radius / min_resolution << "; rebuild at greater depth";
    throw MeasureError(os.str());
  }
  AtomicMeasure moved = m;
  const double s = std::exp(t);
  for (int k = 0; k < m.dim; ++k) kernels::affine(moved.coord[static_cast<std::size_t>(k)], s, -s * x[static_cast<std::size_t>(k)]);
  AtomicMeasure out = empty_like(m.dim);
  const Vec3 origin{0, 0, 0};
  for (std::size_t i = 0; i < moved.size(); ++i) {
    const Vec3 y = moved.point(i);
    if (dist2(y, origin, m.dim) <= 1.0 + kBallSlack && moved.weight[i] > 0.0)
      out.push(y, moved.weight[i], m.tag.empty() ? -1 : m.tag[i]);
  }
  if (!(out.total_mass() > 0.0)) throw MeasureError("zoom: no mass in the window ball");
  out.meta = m.meta;
  out.meta.finest_ratio = m.meta.finest_ratio * s;
  out.meta.provenance = m.meta.provenance + " | zoom t=" + std::to_string(t);
  return out.normalized();
}

AtomicMeasure local_window(const IFS& ifs, std::span<const Component> comps, const Vec3& x, double t,
                           const DepthPolicy& policy, double clip_radius) {
  const int dim = ifs.dim();
  const FloatHull hull = float_hull(ifs);
  const double radius = std::exp(-t), scale = std::exp(t);
  const double leaf = radius / policy.refine * std::pow(ifs.ratio_max(), policy.extra_levels);
  const double r2 = radius * radius * (1.0 + kBallSlack), c2 = clip_radius * clip_radius * (1.0 + kBallSlack);
  const Vec3 origin{0, 0, 0};
  const auto& fm = ifs.float_maps();
  const auto& p = ifs.probs_double();
  constexpr std::size_t cap = std::size_t{1} << 22;

  struct Piece {
    double ratio;
    Vec3 t;
    double w;
    int depth;
  };
  AtomicMeasure out = empty_like(dim);
  std::vector<Piece> stack;
  int max_depth = 0;
  for (const Component& c : comps) {
    if (!(c.weight > 0.0)) continue;
    stack.push_back({c.map.ratio, c.map.translation, c.weight, 0});
    while (!stack.empty()) {
      const Piece q = stack.back();
      stack.pop_back();
      if (box_dist2(hull, dim, q.ratio, q.t, x) > r2) continue;
      if (clip_radius > 0.0 && box_dist2(hull, dim, q.ratio, q.t, origin) > c2) continue;
      if (q.ratio <= leaf) {
        if (dist2(q.t, x, dim) <= r2 && (clip_radius <= 0.0 || dist2(q.t, origin, dim) <= c2)) {
          Vec3 y{0, 0, 0};
          for (int k = 0; k < dim; ++k) y[static_cast<std::size_t>(k)] = scale * (q.t[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)]);
          out.push(y, q.w);
          if (out.size() > cap) throw MeasureError("local_window: atom budget exceeded; lower refine or extra_levels");
        }
        max_depth = std::max(max_depth, q.depth);
        continue;
      }
      // Reverse order so that atoms come out in lexicographic word order.
      for (std::size_t j = fm.size(); j-- > 0;) {
        Piece ch{q.ratio * fm[j].ratio, q.t, q.w * p[j], q.depth + 1};
        for (int k = 0; k < dim; ++k) ch.t[static_cast<std::size_t>(k)] += q.ratio * fm[j].translation[static_cast<std::size_t>(k)];
        stack.push_back(ch);
      }
    }
  }
  out.meta.depth = max_depth;
  out.meta.finest_ratio = leaf * scale;
  out.meta.provenance = "window t=" + std::to_string(t);
  return out;
}

// ---------------------------------------------------------------------------
// Grids

double GridDensity::sum() const { return kernels::sum(values); }

namespace {

int cell_index(double y, int resolution) {
  const int n = 2 * resolution;
  int i = static_cast<int>(std::floor((y + 1.0) * resolution));
  return std::clamp(i, 0, n - 1);
}

std::size_t flat_cell(const Vec3& y, int dim, int resolution) {
  std::size_t idx = 0;
  const auto n = static_cast<std::size_t>(2 * resolution);
  for (int k = 0; k < dim; ++k) idx = idx * n + static_cast<std::size_t>(cell_index(y[static_cast<std::size_t>(k)], resolution));
  return idx;
}

std::size_t grid_cells(int dim, int resolution) {
  std::size_t c = 1;
  for (int k = 0; k < dim; ++k) c *= static_cast<std::size_t>(2 * resolution);
  return c;
}

GridDensity blank_grid(int dim, int resolution) {
  if (resolution < 1) throw MeasureError("grid resolution must be >= 1");
  GridDensity g;
  g.dim = dim;
  g.resolution = resolution;
  g.values.assign(grid_cells(dim, resolution), 0.0);
  return g;
}

Vec3 cell_centre(std::size_t idx, int dim, int resolution) {
  Vec3 c{0, 0, 0};
  const auto n = static_cast<std::size_t>(2 * resolution);
  for (int k = dim - 1; k >= 0; --k) {
    c[static_cast<std::size_t>(k)] = (static_cast<double>(idx % n) + 0.5) / resolution - 1.0;
    idx /= n;
  }
  return c;
}

}  // namespace

GridDensity render_grid(const AtomicMeasure& m, int resolution) {
  GridDensity g = blank_grid(m.dim, resolution);
  for (std::size_t i = 0; i < m.size(); ++i) g.values[flat_cell(m.point(i), m.dim, resolution)] += m.weight[i];
  return g;
}

double grid_l1(const GridDensity& a, const GridDensity& b) {
  if (a.values.size() != b.values.size()) throw MeasureError("grid_l1: grid shapes differ");
  return kernels::l1_distance(a.values, b.values);
}

double tv_grid(const AtomicMeasure& a, const AtomicMeasure& b, int resolution) {
  return grid_l1(render_grid(a.normalized(), resolution), render_grid(b.normalized(), resolution));
}

SortedLine sort_line(const AtomicMeasure& m) {
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& x = m.coord[0];
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  const double total = m.total_mass();
  SortedLine s;
  s.x.reserve(order.size());
  s.cdf.reserve(order.size());
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += m.weight[i] / total;
    if (!s.x.empty() && s.x.back() == x[i]) {
      s.cdf.back() = acc;
    } else {
      s.x.push_back(x[i]);
      s.cdf.push_back(acc);
    }
  }
  if (!s.cdf.empty()) s.cdf.back() = 1.0;
  return s;
}

// Integral of |F_a - F_b| over the merged breakpoints.
double w1_sorted(const SortedLine& a, const SortedLine& b) {
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, prev = 0.0, total = 0.0;
  bool started = false;
  while (i < a.x.size() || j < b.x.size()) {
    const double xa = i < a.x.size() ? a.x[i] : INFINITY;
    const double xb = j < b.x.size() ? b.x[j] : INFINITY;
    const double x = std::min(xa, xb);
    if (started) total += std::fabs(fa - fb) * (x - prev);
    started = true;
    prev = x;
    if (xa == x) fa = a.cdf[i++];
    if (xb == x) fb = b.cdf[j++];
  }
  return total;
}

double w1_line(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.dim != 1 || b.dim != 1) throw MeasureError("w1_line needs one-dimensional measures");
  return w1_sorted(sort_line(a), sort_line(b));
}

double w1_quantized(const AtomicMeasure& a, const AtomicMeasure& b, int resolution) {
  const GridDensity ga = render_grid(a.normalized(), resolution), gb = render_grid(b.normalized(), resolution);
  std::vector<std::size_t> ia, ib;
  std::vector<double> ma, mb;
  for (std::size_t c = 0; c < ga.values.size(); ++c) {
    if (ga.values[c] > 0.0) ia.push_back(c), ma.push_back(ga.values[c]);
    if (gb.values[c] > 0.0) ib.push_back(c), mb.push_back(gb.values[c]);
  }
  std::vector<double> cost(ia.size() * ib.size());
  for (std::size_t r = 0; r < ia.size(); ++r) {
    const Vec3 ca = cell_centre(ia[r], a.dim, resolution);
    for (std::size_t s = 0; s < ib.size(); ++s) cost[r * ib.size() + s] = std::sqrt(dist2(ca, cell_centre(ib[s], a.dim, resolution), a.dim));
  }
  return solve_transport(ma, mb, cost).cost;
}

double measure_distance(DistanceKind kind, const AtomicMeasure& a, const AtomicMeasure& b, int resolution) {
  if (a.dim != b.dim) throw MeasureError("measure_distance: dimensions differ");
  if (kind == DistanceKind::tv_grid) return tv_grid(a, b, resolution);
  return a.dim == 1 ? w1_line(a, b) : w1_quantized(a, b, resolution);
}

GridDensity zeta_density(const AtomicMeasure& nu, std::span<const double> coef_row, int resolution) {
  if (nu.tag.size() != nu.size()) throw MeasureError("zeta_density: reference measure must carry branch tags");
  GridDensity num = blank_grid(nu.dim, resolution), den = blank_grid(nu.dim, resolution);
  const Vec3 origin{0, 0, 0};
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3 y = nu.point(i);
    if (dist2(y, origin, nu.dim) > 1.0 + kBallSlack) continue;
    const std::size_t c = flat_cell(y, nu.dim, resolution);
    const int f = nu.tag[i];
    if (f < 0 || static_cast<std::size_t>(f) >= coef_row.size()) throw MeasureError("zeta_density: tag outside the coefficient row");
    num.values[c] += coef_row[static_cast<std::size_t>(f)] * nu.weight[i];
    den.values[c] += nu.weight[i];
  }
  num.empty.assign(num.values.size(), false);
  for (std::size_t c = 0; c < num.values.size(); ++c) {
    if (den.values[c] > 0.0) {
      num.values[c] /= den.values[c];
    } else {
      num.values[c] = 0.0;
      num.empty[c] = true;
    }
  }
  return num;
}

GridDensity reconstruct_from_zeta(const AtomicMeasure& nu, std::span<const GridDensity> zetas, std::span<const double> q,
                                  int resolution) {
  if (zetas.size() != q.size()) throw MeasureError("reconstruct_from_zeta: one weight per density required");
  GridDensity den = blank_grid(nu.dim, resolution);
  const Vec3 origin{0, 0, 0};
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec3 y = nu.point(i);
    if (dist2(y, origin, nu.dim) <= 1.0 + kBallSlack) den.values[flat_cell(y, nu.dim, resolution)] += nu.weight[i];
  }
  GridDensity out = blank_grid(nu.dim, resolution);
  for (std::size_t h = 0; h < zetas.size(); ++h) {
    if (zetas[h].values.size() != out.values.size()) throw MeasureError("reconstruct_from_zeta: grid shapes differ");
    for (std::size_t c = 0; c < out.values.size(); ++c) out.values[c] += q[h] * zetas[h].values[c] * den.values[c];
  }
  const double total = out.sum();
  if (!(total > 0.0)) throw MeasureError("reconstruct_from_zeta: zero mass in the unit ball");
  for (double& v : out.values) v /= total;
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

std::string export_measure(const AtomicMeasure& m) {
  std::ostringstream os;
  os << "# atomic-measure dim=" << m.dim << " atoms=" << m.size() << "\n";
  os << "# depth=" << m.meta.depth << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m.meta.finest_ratio);
  os << "# finest_ratio=" << buf << "\n";
  os << "# provenance=" << m.meta.provenance << "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int k = 0; k < m.dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m.coord[static_cast<std::size_t>(k)][i]);
      os << buf << ' ';
    }
    std::snprintf(buf, sizeof buf, "%.17g", m.weight[i]);
    os << buf;
    if (!m.tag.empty()) os << ' ' << m.tag[i];
    os << '\n';
  }
  return os.str();
}

AtomicMeasure import_measure(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  AtomicMeasure m;
  bool have_dim = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto value = [&](const std::string& key) -> std::optional<std::string> {
        const auto pos = line.find(key + "=");
        if (pos == std::string::npos) return std::nullopt;
        const auto start = pos + key.size() + 1;
        if (key == "provenance") return line.substr(start);
        return line.substr(start, line.find(' ', start) - start);
      };
      if (auto v = value("dim")) m.dim = std::stoi(*v), have_dim = true;
      if (auto v = value("depth")) m.meta.depth = std::stoi(*v);
      if (auto v = value("finest_ratio")) m.meta.finest_ratio = std::stod(*v);
      if (auto v = value("provenance")) m.meta.provenance = *v;
      continue;
    }
    if (!have_dim) throw MeasureError("import_measure: missing dim header");
    std::istringstream ls(line);
    Vec3 x{0, 0, 0};
    double w = 0.0;
    for (int k = 0; k < m.dim; ++k)
      if (!(ls >> x[static_cast<std::size_t>(k)])) throw MeasureError("import_measure: malformed row: " + line);
    if (!(ls >> w) || w < 0.0) throw MeasureError("import_measure: malformed row: " + line);
    int t = -1;
    if (ls >> t) m.push(x, w, t);
    else m.push(x, w);
  }
  return m;
}

std::string export_grid(const GridDensity& g) {
  std::ostringstream os;
  os << "# grid dim=" << g.dim << " resolution=" << g.resolution << " cells_per_axis=" << g.cells_per_axis() << "\n";
  char buf[64];
  for (std::size_t c = 0; c < g.values.size(); ++c) {
    const Vec3 ctr = cell_centre(c, g.dim, g.resolution);
    for (int k = 0; k < g.dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.6f", ctr[static_cast<std::size_t>(k)]);
      os << buf << ' ';
    }
    std::snprintf(buf, sizeof buf, "%.17g", g.values[c]);
    os << buf;
    if (!g.empty.empty()) os << ' ' << (g.empty[c] ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

}  // namespace wsc
