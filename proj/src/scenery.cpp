#include "wsc/scenery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "wsc/kernels.hpp"
#include "wsc/transport.hpp"

namespace wsc {

namespace {

double log_inv_ratio(const IFS& ifs, Symbol j) { return -std::log(ifs.float_maps()[j].ratio); }


// Float copy of the weight DP, renormalized at every step.
struct FloatWeights {
  Automaton& automaton;
  int state;
  std::vector<double> w;

  FloatWeights(Automaton& a, int s, std::vector<double> w0) : automaton(a), state(s), w(std::move(w0)) {}

  void advance(Symbol j) {
    const StepResult& r = automaton.step_result(state, j);
    std::vector<double> next(static_cast<std::size_t>(r.system.size()), 0.0);
    for (const TransferEntry& e : r.transfer) next[static_cast<std::size_t>(e.to)] += w[static_cast<std::size_t>(e.from)] * e.coef_d;
    double total = 0.0;
    for (double v : next) total += v;
    if (!(total > 0.0)) throw MeasureError("scenery: weights vanished along the word");
    for (double& v : next) v /= total;
    w = std::move(next);
    state = automaton.step(state, j);
  }
};

std::vector<double> normalized_weights(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw MeasureError("scenery: source weights must have positive total");
  for (double& v : w) v /= total;
  return w;
}

double default_dt(const IFS& ifs) { return -std::log(ifs.ratio_max()) / 8.0; }

}  // namespace

SceneryEngine::SceneryEngine(Automaton& automaton, SceneryOptions opt) : automaton_(automaton), opt_(opt) {
  if (opt_.tail_symbols < 1) throw std::invalid_argument("tail_symbols must be >= 1");
}

const std::vector<FloatMap>& SceneryEngine::float_state(int id) {
  if (static_cast<std::size_t>(id) >= cache_.size()) {
    cache_.resize(static_cast<std::size_t>(automaton_.state_count()));
    cached_.resize(cache_.size(), 0);
  }
  if (!cached_[static_cast<std::size_t>(id)]) {
    std::vector<FloatMap> fm;
    for (const Similarity& g : automaton_.state(id).maps) fm.push_back(to_float(g));
    cache_[static_cast<std::size_t>(id)] = std::move(fm);
    cached_[static_cast<std::size_t>(id)] = 1;
  }
  return cache_[static_cast<std::size_t>(id)];
}

Vec3 SceneryEngine::tail_point(std::span<const Symbol> tail) const {
  const std::size_t n = std::min(tail.size(), static_cast<std::size_t>(opt_.tail_symbols));
  return project_point_double(automaton_.ifs(), tail.first(n));
}

double SceneryEngine::alpha0(std::span<const Symbol> tail) const {
  const Vec3 p = tail_point(tail);
  double r2 = 0.0;
  for (double v : p) r2 += v * v;
  const double r = std::sqrt(r2);
  if (!(r < 1.0)) throw MeasureError("scenery: projected point outside the unit ball");
  return -std::log1p(-r);
}

std::size_t SceneryEngine::required_length(std::span<const Symbol> i, double t_max) {
  double L = 0.0;
  std::size_t k = 0;
  const IFS& ifs = automaton_.ifs();
  // alpha0 >= 0, so no prefix beyond the first with L_k > t_max is ever used.
  while (L <= t_max) {
    if (k < i.size()) L += log_inv_ratio(ifs, i[k]);
    else L += -std::log(ifs.ratio_max());
    ++k;
  }
  return k + 1 + static_cast<std::size_t>(opt_.tail_symbols);
}

std::vector<AtomicMeasure> SceneryEngine::frames(std::span<const Symbol> i, std::span<const double> times,
                                                 const FrameSource& source) {
  const IFS& ifs = automaton_.ifs();
  const auto tail = static_cast<std::size_t>(opt_.tail_symbols);
  if (i.size() < tail + 1) throw MeasureError("scenery: word shorter than the tail length");
  if (static_cast<int>(source.weights.size()) != automaton_.state(source.state).size())
    throw MeasureError("scenery: source weights do not match the start state");
  FloatWeights dp(automaton_, source.state, normalized_weights(source.weights));
  double L = 0.0;
  std::size_t k = 0;
  double a_here = alpha0(i);
  double prev_t = -INFINITY;
  std::vector<AtomicMeasure> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < prev_t) throw std::invalid_argument("scenery: times must be nondecreasing");
    if (t < 0.0) throw std::invalid_argument("scenery: times must be >= 0");
    prev_t = t;
    for (;;) {
      const double L_next = L + log_inv_ratio(ifs, i[k]);
      if (L_next > t) break;
      if (k + 1 + tail > i.size()) {
        std::ostringstream os;
        os << "scenery: depth shortfall at t=" << t << "; the word needs at least " << required_length(i, times.back())
           << " symbols (have " << i.size() << ")";
        throw MeasureError(os.str());
      }
      const double a_next = alpha0(i.subspan(k + 1));
      if (L_next + a_next > t) break;
      dp.advance(i[k]);
      L = L_next;
      a_here = a_next;
      ++k;
    }
    (void)a_here;
    const auto& maps = float_state(dp.state);
    std::vector<Component> comps(maps.size());
    for (std::size_t c = 0; c < maps.size(); ++c) comps[c] = {maps[c], dp.w[c]};
    const double clip = (k == 0 && source.clip_root) ? 1.0 : 0.0;
    AtomicMeasure m = local_window(ifs, comps, tail_point(i.subspan(k)), t - L, opt_.policy, clip);
    if (!(m.total_mass() > 0.0)) throw MeasureError("scenery: empty frame");
    m = m.normalized();
    m.meta.provenance = "frame t=" + std::to_string(t) + " k=" + std::to_string(k);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::size_t> thin_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  if (cap == 0 || n <= cap) {
    for (std::size_t j = 0; j < n; ++j) idx.push_back(j);
    return idx;
  }
  if (cap == 1) return {0};
  for (std::size_t j = 0; j < cap; ++j) {
    // Integer rounding of j (n-1)/(cap-1); strictly increasing since n > cap.
    idx.push_back((j * (n - 1) * 2 + (cap - 1)) / (2 * (cap - 1)));
  }
  return idx;
}

SceneryTrajectory scenery_trajectory(SceneryEngine& engine, std::span<const Symbol> i, double T, double dt, std::size_t cap) {
  if (!(dt > 0.0) || T < 0.0) throw std::invalid_argument("scenery_trajectory: needs dt > 0 and T >= 0");
  const auto count = static_cast<std::size_t>(std::floor(T / dt + 1e-9)) + 1;
  SceneryTrajectory traj;
  traj.word.assign(i.begin(), i.end());
  traj.x = engine.tail_point(i);
  for (std::size_t j : thin_indices(count, cap)) traj.times.push_back(static_cast<double>(j) * dt);
  traj.frames = engine.frames(i, traj.times);
  return traj;
}

ReturnTimeRecord return_times(const SceneryEngine& engine, std::span<const Symbol> i, std::span<const Symbol> window,
                              std::size_t max_visits) {
  if (window.empty()) throw std::invalid_argument("return_times: empty window");
  const IFS& ifs = engine.ifs();
  const auto tail = static_cast<std::size_t>(engine.options().tail_symbols);
  ReturnTimeRecord rec;
  rec.window.assign(window.begin(), window.end());
  const std::size_t w = window.size();
  const std::size_t last = i.size() > tail ? i.size() - tail : 0;
  double L = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k >= w && std::equal(window.begin(), window.end(), i.begin() + static_cast<std::ptrdiff_t>(k - w))) {
      const double a = engine.alpha0(i.subspan(k));
      rec.t.push_back(k);
      rec.alpha0.push_back(a);
      rec.log_ratio.push_back(L);
      rec.r.push_back(L + a);
      if (max_visits && rec.t.size() >= max_visits) {
        rec.length = k;
        break;
      }
    }
    if (k < i.size()) L += log_inv_ratio(ifs, i[k]);
    rec.length = k;
  }
  if (rec.t.empty()) {
    std::ostringstream os;
    os << "return_times: no visit of the window " << format_word(window) << " in " << i.size()
       << " symbols; sample a longer word (visit probability " << ifs.word_prob_double(window) << ")";
    throw MeasureError(os.str());
  }
  for (std::size_t n = 0; n + 1 < rec.t.size(); ++n) rec.tau.push_back(rec.t[n + 1] - rec.t[n]);
  return rec;
}

Word sample_with_visits(SceneryEngine& engine, std::span<const Symbol> window, std::size_t visits, std::uint64_t seed,
                        ReturnTimeRecord& rec) {
  const IFS& ifs = engine.ifs();
  const double p = ifs.word_prob_double(window);
  auto len = static_cast<std::size_t>(1.5 * static_cast<double>(visits + 1) / p) + 1000;
  for (;;) {
    Word w = sample_word(ifs, len, seed);
    const auto tail = static_cast<std::size_t>(engine.options().tail_symbols);
    if (std::search(w.begin(), w.end() - static_cast<std::ptrdiff_t>(tail), window.begin(), window.end()) != w.end() - static_cast<std::ptrdiff_t>(tail)) {
      rec = return_times(engine, w, window, visits);
      if (rec.t.size() >= visits) return w;
    }
    len *= 2;
  }
}

std::string TestFunctional::name() const {
  switch (kind) {
    case Functional::one: return "one";
    case Functional::eta: return "eta";
    case Functional::cylinder: {
      // space separated so the name can sit in a CSV field
      std::string w = format_word(cylinder);
      std::replace(w.begin(), w.end(), ',', ' ');
      return "cyl[" + w + "]";
    }
  }
  return "?";
}

BirkhoffResult birkhoff_average(std::span<const Symbol> i, const ReturnTimeRecord& record, const TestFunctional& g,
                                std::size_t n) {
  BirkhoffResult res;
  const std::size_t available = g.kind == Functional::eta ? record.tau.size() : record.t.size();
  const std::size_t count = n == 0 ? available : std::min(n, available);
  if (n != 0 && n > available) throw std::invalid_argument("birkhoff_average: fewer visits than requested");
  for (std::size_t k = 0; k < count; ++k) {
    double v = 1.0;
    if (g.kind == Functional::eta) {
      v = record.r[k + 1] - record.r[k];
    } else if (g.kind == Functional::cylinder) {
      const std::size_t s = record.t[k];
      if (s + g.cylinder.size() > i.size()) throw std::invalid_argument("birkhoff_average: cylinder runs past the word");
      v = std::equal(g.cylinder.begin(), g.cylinder.end(), i.begin() + static_cast<std::ptrdiff_t>(s)) ? 1.0 : 0.0;
    }
    res.values.push_back(v);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < res.values.size(); ++k) {
    acc += res.values[k];
    res.partial.push_back(acc / static_cast<double>(k + 1));
  }
  if (!res.values.empty()) res.mean = acc / static_cast<double>(res.values.size());
  if (res.values.size() > 1) {
    double ss = 0.0;
    for (double v : res.values) ss += (v - res.mean) * (v - res.mean);
    res.sd = std::sqrt(ss / static_cast<double>(res.values.size() - 1));
  }
  return res;
}

EmpiricalDistribution empirical_tangent_distribution(const SceneryTrajectory& traj) {
  if (traj.frames.size() < 2) throw std::invalid_argument("empirical_tangent_distribution: needs at least two frames");
  EmpiricalDistribution d;
  d.members = traj.frames;
  d.weights.assign(traj.frames.size(), 1.0 / static_cast<double>(traj.frames.size()));
  d.times = traj.times;
  return d;
}

std::vector<double> reference_weights(Automaton& automaton, const B0Certificate& cert, const ZetaCoefficients& zeta,
                                      std::span<const Symbol> prefix) {
  if (prefix.size() < cert.b0.size()) throw std::invalid_argument("reference_weights: prefix shorter than b0");
  FloatWeights dp(automaton, 0, {1.0});
  for (Symbol j : prefix.first(prefix.size() - cert.b0.size())) dp.advance(j);
  if (!(automaton.state(dp.state) == cert.n0)) throw MeasureError("reference_weights: prefix does not reach the maximal system");
  std::vector<double> lambda(static_cast<std::size_t>(cert.n0.size()), 0.0);
  for (std::size_t h = 0; h < cert.family.size(); ++h) {
    const double q = dp.w[static_cast<std::size_t>(cert.family[h])];
    for (std::size_t f = 0; f < lambda.size(); ++f) lambda[f] += q * zeta.coef[h][f].get_d();
  }
  return normalized_weights(std::move(lambda));
}

namespace {

std::vector<double> grid_times(double lo, double hi, double dt, std::size_t cap) {
  // Grid points j dt in [lo, hi).
  const auto first = static_cast<std::size_t>(std::ceil(lo / dt - 1e-9));
  std::vector<double> all;
  for (std::size_t j = first;; ++j) {
    const double t = static_cast<double>(j) * dt;
    if (t >= hi) break;
    all.push_back(t);
  }
  std::vector<double> out;
  for (std::size_t j : thin_indices(all.size(), cap)) out.push_back(all[j]);
  return out;
}

EmpiricalDistribution uniform_distribution(std::vector<AtomicMeasure> members, std::vector<double> times) {
  EmpiricalDistribution d;
  d.weights.assign(members.size(), members.empty() ? 0.0 : 1.0 / static_cast<double>(members.size()));
  d.members = std::move(members);
  d.times = std::move(times);
  return d;
}

}  // namespace

EmpiricalDistribution assemble_qn(SceneryEngine& engine, const B0Certificate& cert, const ZetaCoefficients& zeta,
                                  std::span<const Symbol> i, const ReturnTimeRecord& record, const QnOptions& opt) {
  if (opt.n < 1 || opt.n >= record.t.size()) throw std::invalid_argument("assemble_qn: needs n + 1 recorded visits");
  const double dt = opt.dt > 0.0 ? opt.dt : default_dt(engine.ifs());
  const std::vector<double> times = grid_times(record.r[0], record.r[opt.n], dt, opt.cap);
  Automaton& automaton = engine.automaton();
  std::vector<AtomicMeasure> members;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < opt.n && pos < times.size(); ++k) {
    std::vector<double> local;
    while (pos < times.size() && times[pos] < record.r[k + 1]) local.push_back(times[pos++] - record.r[k] + record.alpha0[k]);
    if (local.empty()) continue;
    const auto tail = i.subspan(record.t[k]);
    FrameSource src;
    if (opt.frames == QnFrames::reference) {
      const auto prefix = i.first(record.t[k]);
      src.state = automaton.walk(prefix);
      src.weights = reference_weights(automaton, cert, zeta, prefix);
      src.clip_root = true;
    }
    auto f = engine.frames(tail, local, src);
    for (auto& m : f) members.push_back(std::move(m));
  }
  return uniform_distribution(std::move(members), times);
}

EmpiricalDistribution direct_average(SceneryEngine& engine, std::span<const Symbol> i, const ReturnTimeRecord& record,
                                     const QnOptions& opt) {
  if (opt.n < 1 || opt.n >= record.t.size()) throw std::invalid_argument("direct_average: needs n + 1 recorded visits");
  const double dt = opt.dt > 0.0 ? opt.dt : default_dt(engine.ifs());
  const std::vector<double> times = grid_times(0.0, record.r[opt.n], dt, opt.cap);
  return uniform_distribution(engine.frames(i, times), times);
}

FrameSignature frame_signature(const AtomicMeasure& m) {
  FrameSignature s;
  s.dim = m.dim;
  if (m.dim != 1) {
    s.atoms = m.normalized();
    return s;
  }
  s.cdf.assign(kSignatureCells, 0.0);
  const double total = m.total_mass();
  for (std::size_t a = 0; a < m.size(); ++a) {
    int c = static_cast<int>(std::floor((m.coord[0][a] + 1.0) * (kSignatureCells / 2)));
    c = std::clamp(c, 0, kSignatureCells - 1);
    s.cdf[static_cast<std::size_t>(c)] += m.weight[a] / total;
  }
  double acc = 0.0;
  for (double& v : s.cdf) {
    acc += v;
    v = acc;
  }
  return s;
}

double signature_w1(const FrameSignature& a, const FrameSignature& b, int resolution) {
  if (a.dim != b.dim) throw MeasureError("signature_w1: dimensions differ");
  if (a.dim != 1) return w1_quantized(a.atoms, b.atoms, resolution);
  return kernels::l1_distance(a.cdf, b.cdf) * (2.0 / kSignatureCells);
}

double distribution_distance(std::span<const FrameSignature> a, std::span<const double> wa,
                             std::span<const FrameSignature> b, std::span<const double> wb) {
  std::vector<double> cost(a.size() * b.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b.size(); ++c) cost[r * b.size() + c] = signature_w1(a[r], b[c]);
  return solve_transport(wa, wb, cost).cost;
}

double distribution_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b, std::size_t cap) {
  auto prepare = [cap](const EmpiricalDistribution& d, std::vector<FrameSignature>& sig, std::vector<double>& w) {
    if (d.members.empty()) throw std::invalid_argument("distribution_distance: empty distribution");
    for (std::size_t j : thin_indices(d.members.size(), cap)) {
      sig.push_back(frame_signature(d.members[j]));
      w.push_back(d.weights.empty() ? 1.0 : d.weights[j]);
    }
  };
  std::vector<FrameSignature> sa, sb;
  std::vector<double> wa, wb;
  prepare(a, sa, wa);
  prepare(b, sb, wb);
  return distribution_distance(sa, wa, sb, wb);
}

IFS high_level_iteration(const IFS& ifs, int level) {
  if (level < 1) throw std::invalid_argument("high_level_iteration: level must be >= 1");
  const double count = std::pow(static_cast<double>(ifs.size()), level);
  if (count > 255) throw std::invalid_argument("high_level_iteration: more than 255 maps");
  std::vector<Similarity> maps;
  std::vector<mpq_class> probs;
  Word w(static_cast<std::size_t>(level), 0);
  for (;;) {
    maps.push_back(compose_word(ifs, w));
    probs.push_back(ifs.word_prob(w));
    int pos = level - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] + 1 == ifs.size()) w[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++w[static_cast<std::size_t>(pos)];
  }
  return IFS(ifs.field(), ifs.dim(), std::move(maps), std::move(probs));
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ConvergenceReport convergence_report(SceneryEngine& engine, const ConvergenceOptions& opt) {
  const IFS& ifs = engine.ifs();
  const double unit = -std::log(ifs.ratio_max());
  ConvergenceReport rep;
  rep.dt = opt.dt > 0.0 ? opt.dt : unit / 8.0;
  const double dt = rep.dt;
  double horizon = 0.0;
  for (double T : opt.T_units) horizon = std::max(horizon, T * unit * (opt.self_distance ? 2.0 : 1.0));
  const int npoints = 2 * opt.points;

  // Per point: signatures at the union of all thinned grids it needs.
  struct Horizon {
    double T;
    std::vector<double> times;
  };
  std::vector<Horizon> horizons;
  for (double T : opt.T_units) {
    horizons.push_back({T * unit, {}});
    if (opt.self_distance) horizons.push_back({2.0 * T * unit, {}});
  }
  std::set<double> needed;
  for (Horizon& h : horizons) {
    const auto count = static_cast<std::size_t>(std::floor(h.T / dt + 1e-9)) + 1;
    for (std::size_t j : thin_indices(count, opt.cap)) h.times.push_back(static_cast<double>(j) * dt);
    needed.insert(h.times.begin(), h.times.end());
  }
  const std::vector<double> all(needed.begin(), needed.end());

  std::vector<std::map<double, FrameSignature>> sig(static_cast<std::size_t>(npoints));
  for (int p = 0; p < npoints; ++p) {
    const Word probe = sample_word(ifs, 16, derive_seed(opt.seed, static_cast<std::uint64_t>(p)));
    const std::size_t len = engine.required_length(probe, horizon) + 16;
    const Word i = sample_word(ifs, len, derive_seed(opt.seed, static_cast<std::uint64_t>(p)));
    const auto frames = engine.frames(i, all);
    for (std::size_t j = 0; j < all.size(); ++j) sig[static_cast<std::size_t>(p)].emplace(all[j], frame_signature(frames[j]));
  }
  auto dist_of = [&](int p, const Horizon& hp, int q, const Horizon& hq) {
    std::vector<FrameSignature> a, b;
    for (double t : hp.times) a.push_back(sig[static_cast<std::size_t>(p)].at(t));
    for (double t : hq.times) b.push_back(sig[static_cast<std::size_t>(q)].at(t));
    const std::vector<double> wa(a.size(), 1.0 / static_cast<double>(a.size())), wb(b.size(), 1.0 / static_cast<double>(b.size()));
    return distribution_distance(a, wa, b, wb);
  };

  const std::size_t stride = opt.self_distance ? 2 : 1;
  for (std::size_t ti = 0; ti < opt.T_units.size(); ++ti) {
    const Horizon& h = horizons[ti * stride];
    std::vector<double> pair;
    for (int p = 0; p < opt.points; ++p) {
      const double d = dist_of(2 * p, h, 2 * p + 1, h);
      pair.push_back(d);
      rep.rows.push_back({"pair", p, opt.T_units[ti], d});
    }
    rep.median_pair.push_back(median(pair));
    if (opt.self_distance) {
      const Horizon& h2 = horizons[ti * stride + 1];
      std::vector<double> self;
      for (int p = 0; p < npoints; ++p) {
        const double d = dist_of(p, h, p, h2);
        self.push_back(d);
        rep.rows.push_back({"self", p, opt.T_units[ti], d});
      }
      rep.median_self.push_back(median(self));
    }
  }
  return rep;
}

}  // namespace wsc
