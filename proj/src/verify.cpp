#include "wsc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "wsc/normality.hpp"

namespace wsc {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

double unit_of(const IFS& ifs) { return -std::log(ifs.ratio_max()); }

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CheckResult make(int criterion, const std::string& system, const std::string& metric) {
  CheckResult r;
  r.criterion = criterion;
  r.system = system;
  r.metric = metric;
  return r;
}

// Words of length n in lexicographic order.
template <class F>
void for_each_word(int alphabet, int n, F&& f) {
  Word w(static_cast<std::size_t>(n), 0);
  for (;;) {
    f(w);
    int pos = n - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] + 1 == alphabet) w[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) return;
    ++w[static_cast<std::size_t>(pos)];
  }
}

std::vector<double> normalize(std::vector<double> v) {
  double t = 0.0;
  for (double x : v) t += x;
  for (double& x : v) x /= t;
  return v;
}

}  // namespace

VerifyProfile VerifyProfile::full() { return {}; }

VerifyProfile VerifyProfile::quick() {
  VerifyProfile p;
  p.name = "quick";
  p.lemma_trials = 20;
  p.brute_len_dyadic = 6;
  p.brute_len_golden = 7;
  p.dp_len = 5;
  p.recon_samples = 4;
  p.trend_points = 8;
  p.qn_n = 8;
  p.scaling_pairs = 3;
  p.return_visits = 200;
  p.return_visits_second = 400;
  p.weyl_samples = 8;
  p.weyl_horizons = {64, 256};
  return p;
}

// ---------------------------------------------------------------------------
// SystemContext

SystemContext::SystemContext(SystemConfig cfg, GeomOptions geom)
    : cfg_(std::move(cfg)), geom_(geom), automaton_(std::make_unique<Automaton>(cfg_.system, geom)) {}

const AutomatonReport& SystemContext::report() {
  if (!report_) report_ = automaton_->explore(10000, 400);
  return *report_;
}

const Word& SystemContext::a0() {
  if (!a0_) a0_ = find_a0(report());
  return *a0_;
}

const NeighbourhoodSystem& SystemContext::n0() {
  if (!n0_) n0_ = neighbourhood_system(ifs(), a0(), geom_);
  return *n0_;
}

const B0Certificate& SystemContext::certificate() {
  if (!cert_) cert_ = construct_b0(ifs(), a0(), n0(), {}, geom_);
  return *cert_;
}

const ZetaCoefficients& SystemContext::zeta() {
  if (!zeta_) zeta_ = compute_zeta_coefficients(ifs(), certificate());
  return *zeta_;
}

Word SystemContext::window() {
  Word w = certificate().a0;
  w.insert(w.end(), certificate().b0.begin(), certificate().b0.end());
  return w;
}

SceneryEngine& SystemContext::engine() {
  if (!engine_) engine_ = std::make_unique<SceneryEngine>(*automaton_);
  return *engine_;
}

// ---------------------------------------------------------------------------
// Direct oracle for magnifications

GridDensity direct_magnification_grid(const IFS& ifs, std::span<const Symbol> a, int extra_levels, int resolution) {
  const int dim = ifs.dim();
  const FloatMap fa = to_float(compose_word(ifs, a));
  const double ra = fa.ratio;
  const double leaf = ra * std::pow(ifs.ratio_max(), extra_levels);
  Vec3 lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    lo[static_cast<std::size_t>(k)] = ifs.hull().lo[static_cast<std::size_t>(k)].to_double();
    hi[static_cast<std::size_t>(k)] = ifs.hull().hi[static_cast<std::size_t>(k)].to_double();
  }
  const double r2 = ra * ra * (1.0 + 1e-12);
  const auto& fm = ifs.float_maps();
  const auto& p = ifs.probs_double();
  AtomicMeasure atoms;
  atoms.dim = dim;
  struct Piece {
    double ratio;
    Vec3 t;
    double w;
  };
  std::vector<Piece> stack{{1.0, {0, 0, 0}, 1.0}};
  while (!stack.empty()) {
    const Piece q = stack.back();
    stack.pop_back();
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double l = q.ratio * lo[kk] + q.t[kk], h = q.ratio * hi[kk] + q.t[kk], c = fa.translation[kk];
      const double d = c < l ? l - c : (c > h ? c - h : 0.0);
      d2 += d * d;
    }
    if (d2 > r2) continue;
    if (q.ratio <= leaf) {
      Vec3 y{0, 0, 0};
      double n2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        y[kk] = (q.t[kk] - fa.translation[kk]) / ra;
        n2 += y[kk] * y[kk];
      }
      if (n2 <= 1.0 + 1e-12) atoms.push(y, q.w);
      continue;
    }
    for (std::size_t j = 0; j < fm.size(); ++j) {
      Piece c{q.ratio * fm[j].ratio, q.t, q.w * p[j]};
      for (int k = 0; k < dim; ++k) c.t[static_cast<std::size_t>(k)] += q.ratio * fm[j].translation[static_cast<std::size_t>(k)];
      stack.push_back(c);
    }
  }
  return render_grid(atoms.normalized(), resolution);
}

// ---------------------------------------------------------------------------
// Criteria

std::vector<CheckResult> check_exact_overlap(SystemContext& s) {
  Stopwatch sw;
  const IFS& ifs = s.ifs();
  CheckResult r = make(1, s.name(), "collapsed_words");
  const Word a = parse_word("1,2,2", ifs.size()), b = parse_word("2,1,1", ifs.size());
  const bool equal = compose_word(ifs, a) == compose_word(ifs, b);
  const bool identity = relative_map(ifs, a, b).is_identity();
  // Every word of length 3 realizing phi_a lands on the identity member of N(a).
  int count = 0;
  mpq_class mass(0);
  const Similarity target = compose_word(ifs, a);
  for_each_word(ifs.size(), 3, [&](const Word& w) {
    if (compose_word(ifs, w) == target) {
      ++count;
      mass += ifs.word_prob(w);
    }
  });
  const WeightedSystem ws = neighbourhood_weighted(ifs, a);
  const WeightedSystem bf = brute_force_weighted(ifs, a);
  const int id = ws.base.index_of(Similarity::identity(ifs.field(), ifs.dim()));
  const bool merged = id >= 0 && ws.weights[static_cast<std::size_t>(id)] == mass && bf.base == ws.base &&
                      bf.weights[static_cast<std::size_t>(id)] == mass;
  r.value = count;
  r.threshold = 2;
  r.seconds = sw.seconds();
  r.pass = equal && identity && count >= 2 && merged && r.seconds < 1.0;
  std::ostringstream os;
  os << "phi_122==phi_211:" << (equal ? "yes" : "no") << " identity_member_weight=" << (id >= 0 ? ws.weights[static_cast<std::size_t>(id)].get_str() : "missing")
     << " expected=" << mass.get_str();
  r.detail = os.str();
  return {r};
}

std::vector<CheckResult> check_closure(std::vector<SystemContext*> systems, const VerifyProfile& p) {
  std::vector<CheckResult> out;
  for (SystemContext* s : systems) {
    Stopwatch sw;
    const AutomatonReport& rep = s->report();
    const int len = s->name() == "golden_bc" ? p.brute_len_golden : p.brute_len_dyadic;
    int best = 0;
    for (int n = 1; n <= len; ++n)
      for_each_word(s->ifs().size(), n, [&](const Word& w) { best = std::max(best, brute_force_weighted(s->ifs(), w).base.size()); });
    CheckResult r = make(2, s->name(), "max_cardinality");
    r.value = rep.max_cardinality;
    r.threshold = best;
    r.depth = len;
    r.seconds = sw.seconds();
    const int states = static_cast<int>(rep.states.size());
    r.pass = rep.closed && states <= 10000 && rep.max_cardinality == best && r.seconds < 60.0;
    if (s->name() == "strong_separation") r.pass = r.pass && states == 1;
    std::ostringstream os;
    os << "closed=" << (rep.closed ? "yes" : "no") << " states=" << states << " brute_force_max=" << best << " over |a|<=" << len;
    r.detail = os.str();
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> check_lemma_maximal(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  const LemmaMaximalReport lm = verify_lemma_maximal(s.ifs(), s.a0(), s.n0(), p.lemma_trials, derive_seed(p.seed, 300));
  CheckResult r = make(3, s.name(), "passed_trials");
  r.value = lm.passed;
  r.threshold = p.lemma_trials;
  r.depth = 12;
  r.seconds = sw.seconds();
  r.pass = lm.ok() && r.seconds < 60.0;
  r.detail = "a0=" + format_word(s.a0()) + " |N0|=" + std::to_string(s.n0().size()) + " failed=" + std::to_string(lm.failed) +
             " undecided=" + std::to_string(lm.undecided);
  return {r};
}

std::vector<CheckResult> check_b0(SystemContext& s) {
  Stopwatch sw;
  const B0Certificate& cert = s.certificate();
  CheckResult r = make(4, s.name(), "min_C_h");
  const CertificateCheck chk = recheck_certificate(s.ifs(), cert);
  bool positive = false;
  std::string cs;
  try {
    const ZetaCoefficients& z = s.zeta();
    positive = std::all_of(z.c_h.begin(), z.c_h.end(), [](const mpq_class& c) { return c > 0; });
    mpq_class mn = z.c_h.front();
    for (const auto& c : z.c_h) mn = std::min(mn, c), cs += (cs.empty() ? "" : ";") + c.get_str();
    r.value = mn.get_d();
  } catch (const std::exception& e) {
    cs = e.what();
  }
  r.threshold = 0.0;
  r.depth = cert.disjointness_depth;
  r.seconds = sw.seconds();
  r.pass = cert.complete && chk.ok() && positive && r.seconds < 120.0;
  std::ostringstream os;
  os << "b0=" << format_word(cert.b0) << " |F|=" << cert.family.size() << " identities=" << chk.identities
     << " neighbourhoods=" << chk.neighbourhoods << " disjointness=" << chk.disjointness << " C_h=" << cs;
  if (!cert.complete) os << " failure=" << cert.failure;
  r.detail = os.str();
  return {r};
}

std::vector<CheckResult> check_weights_dp(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  int words = 0, mismatches = 0;
  for (int n = 1; n <= p.dp_len; ++n)
    for_each_word(s.ifs().size(), n, [&](const Word& w) {
      ++words;
      const WeightedSystem dp = s.automaton().weights(w);
      const WeightedSystem bf = brute_force_weighted(s.ifs(), w);
      if (!(dp.base == bf.base) || dp.weights != bf.weights) ++mismatches;
    });
  CheckResult r = make(5, s.name(), "mismatched_words");
  r.value = mismatches;
  r.threshold = 0;
  r.depth = p.dp_len;
  r.seconds = sw.seconds();
  r.pass = mismatches == 0 && r.seconds < 60.0;
  r.detail = "words=" + std::to_string(words) + " exact rational comparison";
  return {r};
}

std::vector<CheckResult> check_reconstruction(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  const IFS& ifs = s.ifs();
  const int R = p.recon_resolution;
  const int nu_depth = static_cast<int>(std::ceil(std::log(R * 256.0) / unit_of(ifs)));
  const int extra = std::max(nu_depth - 2, 1);
  const B0Certificate& cert = s.certificate();
  const ZetaCoefficients& z = s.zeta();
  const AtomicMeasure nu = build_reference_nu(ifs, s.n0(), nu_depth);
  std::vector<GridDensity> zetas;
  for (const auto& row : z.coef) {
    std::vector<double> rd;
    for (const auto& c : row) rd.push_back(c.get_d());
    zetas.push_back(zeta_density(nu, rd, R));
  }
  const Word window = s.window();
  std::mt19937_64 gen(derive_seed(p.seed, 600));
  std::vector<double> tvs;
  bool identity = true;
  for (int j = 0; j < p.recon_samples; ++j) {
    const std::size_t prefix = static_cast<std::size_t>(gen() % 13);
    Word a = sample_word(ifs, prefix + 1, derive_seed(p.seed, 601 + static_cast<std::uint64_t>(j)));
    a.resize(prefix);
    a.insert(a.end(), window.begin(), window.end());
    const std::vector<mpq_class> q = zeta_mixture_raw(s.automaton(), cert, a);
    // Exact identity: w_f(a) is proportional to sum_h q_h coef[h][f].
    const WeightedSystem ws = s.automaton().weights(a);
    std::vector<mpq_class> lam(static_cast<std::size_t>(s.n0().size()));
    for (std::size_t h = 0; h < q.size(); ++h)
      for (std::size_t f = 0; f < lam.size(); ++f) lam[f] += q[h] * z.coef[h][f];
    mpq_class tl(0), tw(0);
    for (std::size_t f = 0; f < lam.size(); ++f) tl += lam[f], tw += ws.weights[f];
    for (std::size_t f = 0; f < lam.size(); ++f)
      if (ws.weights[f] * tl != lam[f] * tw) identity = false;
    std::vector<double> qd;
    for (const auto& v : q) qd.push_back(v.get_d());
    const GridDensity recon = reconstruct_from_zeta(nu, zetas, normalize(qd), R);
    const GridDensity direct = direct_magnification_grid(ifs, a, extra, R);
    tvs.push_back(grid_l1(direct, recon));
  }
  CheckResult r = make(6, s.name(), "max_tv_grid");
  r.value = *std::max_element(tvs.begin(), tvs.end());
  r.threshold = 0.05;
  r.depth = nu_depth;
  r.resolution = R;
  r.seconds = sw.seconds();
  r.pass = r.value <= r.threshold && identity && r.seconds < 600.0;
  r.detail = "samples=" + std::to_string(tvs.size()) + " median=" + fmt(median(tvs)) + " direct_extra_levels=" + std::to_string(extra) +
             " weight_identity=" + (identity ? "exact" : "violated");
  return {r};
}

std::vector<CheckResult> check_zoom_trend(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  const IFS& ifs = s.ifs();
  SceneryEngine& engine = s.engine();
  const double unit = unit_of(ifs);
  std::vector<double> times;
  for (int m = 2; m <= 12; m += 2) times.push_back(m * unit);
  // A fixed zeta from an independent word at its first visit.
  ReturnTimeRecord rec;
  const Word j = sample_with_visits(engine, s.window(), 1, derive_seed(p.seed, 700), rec);
  const auto prefix = std::span<const Symbol>(j).first(rec.t[0]);
  FrameSource src;
  src.state = s.automaton().walk(prefix);
  src.weights = reference_weights(s.automaton(), s.certificate(), s.zeta(), prefix);
  src.clip_root = true;
  std::vector<std::vector<double>> tv(times.size());
  for (int m = 0; m < p.trend_points; ++m) {
    const Word i = sample_word(ifs, engine.required_length({}, times.back()), derive_seed(p.seed, 800 + static_cast<std::uint64_t>(m)));
    const auto a = engine.frames(i, times);
    const auto b = engine.frames(i, times, src);
    for (std::size_t k = 0; k < times.size(); ++k) tv[k].push_back(tv_grid(a[k], b[k], p.trend_resolution));
  }
  std::vector<double> med;
  for (auto& v : tv) med.push_back(median(v));
  // Least-squares slope of the medians against t.
  double mt = 0, mm = 0;
  for (std::size_t k = 0; k < med.size(); ++k) mt += times[k], mm += med[k];
  mt /= static_cast<double>(med.size());
  mm /= static_cast<double>(med.size());
  double num = 0, den = 0;
  for (std::size_t k = 0; k < med.size(); ++k) num += (times[k] - mt) * (med[k] - mm), den += (times[k] - mt) * (times[k] - mt);
  CheckResult r = make(7, s.name(), "median_tv_t12_over_t2");
  r.value = med.back() / med.front();
  r.threshold = 1.0;
  r.resolution = p.trend_resolution;
  r.depth = SceneryOptions{}.policy.extra_levels;
  r.seconds = sw.seconds();
  bool strict = true;
  for (std::size_t k = 1; k < med.size(); ++k) strict = strict && med[k] < med[k - 1];
  r.pass = strict && num / den < 0.0 && r.seconds < 600.0;
  std::ostringstream os;
  os << "medians(t=2..12 log(1/rho))=";
  for (std::size_t k = 0; k < med.size(); ++k) os << (k ? ";" : "") << fmt(med[k]);
  os << " strictly_decreasing=" << (strict ? "yes" : "no") << " slope=" << fmt(num / den) << " points=" << p.trend_points;
  r.detail = os.str();
  return {r};
}

std::vector<CheckResult> check_qn(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  SceneryEngine& engine = s.engine();
  ReturnTimeRecord rec;
  const Word w = sample_with_visits(engine, s.window(), p.qn_n + 1, derive_seed(p.seed, 900), rec);
  QnOptions qo;
  qo.n = p.qn_n;
  const double dt = unit_of(s.ifs()) / 8.0;
  const EmpiricalDistribution direct = direct_average(engine, w, rec, qo);
  const EmpiricalDistribution q_self = assemble_qn(engine, s.certificate(), s.zeta(), w, rec, qo);
  qo.frames = QnFrames::reference;
  const EmpiricalDistribution q_ref = assemble_qn(engine, s.certificate(), s.zeta(), w, rec, qo);
  const double d_self = distribution_distance(q_self, direct);
  const double d_ref = distribution_distance(q_ref, direct);
  CheckResult r = make(8, s.name(), "distance_qn_direct");
  r.value = d_self;
  r.threshold = 0.1;
  r.dt = dt;
  r.depth = SceneryOptions{}.policy.extra_levels;
  r.resolution = kSignatureCells / 2;
  r.seconds = sw.seconds();
  r.pass = d_self <= 0.1 && r.seconds < 900.0;
  r.detail = "n=" + std::to_string(p.qn_n) + " r_n=" + fmt(rec.r[p.qn_n]) + " members=" + std::to_string(q_self.members.size()) +
             "/" + std::to_string(direct.members.size()) + " reference_frames_distance=" + fmt(d_ref);
  return {r};
}

std::vector<CheckResult> check_uniform_scaling(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  ConvergenceOptions co;
  co.points = p.scaling_pairs;
  co.T_units = {5.0, 20.0};
  co.seed = derive_seed(p.seed, 1000);
  const ConvergenceReport rep = convergence_report(s.engine(), co);
  const double secs = sw.seconds();
  CheckResult r = make(9, s.name(), "median_pair_ratio_T20_T5");
  r.value = rep.median_pair[1] / rep.median_pair[0];
  r.threshold = 0.6;
  r.dt = rep.dt;
  r.resolution = kSignatureCells / 2;
  r.depth = SceneryOptions{}.policy.extra_levels;
  r.seconds = secs;
  r.pass = r.value <= 0.6 && secs < 1200.0;
  r.detail = "median_pair T5=" + fmt(rep.median_pair[0]) + " T20=" + fmt(rep.median_pair[1]) + " pairs=" + std::to_string(p.scaling_pairs);
  CheckResult q = r;
  q.metric = "median_self_T20_minus_T5";
  q.value = rep.median_self[1] - rep.median_self[0];
  q.threshold = 0.0;
  q.pass = q.value < 0.0 && secs < 1200.0;
  q.detail = "median_self([0,T],[0,2T]) T5=" + fmt(rep.median_self[0]) + " T20=" + fmt(rep.median_self[1]);
  return {r, q};
}

std::vector<CheckResult> check_return_asymptotics(SystemContext& s, const VerifyProfile& p) {
  Stopwatch sw;
  SceneryEngine& engine = s.engine();
  const IFS& ifs = s.ifs();
  const Word window = s.window();
  const std::size_t n = p.return_visits;
  ReturnTimeRecord r1, r2;
  const Word w1 = sample_with_visits(engine, window, n + 1, derive_seed(p.seed, 1100), r1);
  const Word w2 = sample_with_visits(engine, window, p.return_visits_second + 1, derive_seed(p.seed, 1101), r2);
  const double pw = ifs.word_prob_double(window);
  std::vector<TestFunctional> gs{{Functional::eta, {}}, {Functional::cylinder, parse_word("1", ifs.size())},
                                 {Functional::cylinder, parse_word("2,1", ifs.size())}};
  std::vector<CheckResult> out;
  for (const TestFunctional& g : gs) {
    const BirkhoffResult b1 = birkhoff_average(w1, r1, g, n);
    const BirkhoffResult b2 = birkhoff_average(w2, r2, g, p.return_visits_second);
    double exact = 0.0;
    if (g.kind == Functional::eta) exact = ifs.equicontractive() ? unit_of(ifs) / pw : NAN;
    else exact = ifs.word_prob_double(g.cylinder);
    CheckResult r = make(10, s.name(), "birkhoff_" + g.name());
    r.value = std::fabs(b1.mean - b2.mean);
    r.threshold = 3.0 * b1.sd / std::sqrt(static_cast<double>(n));
    r.depth = static_cast<int>(n);
    r.seconds = sw.seconds();
    r.pass = r.value <= r.threshold && r.seconds < 300.0;
    r.detail = "average=" + fmt(b1.mean) + " direct_conditional=" + fmt(b2.mean) + " (n2=" + std::to_string(p.return_visits_second) +
               ") sd=" + fmt(b1.sd) + " exact=" + fmt(exact);
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> check_normality(SystemContext& golden, SystemContext& dyadic, const VerifyProfile& p) {
  Stopwatch sw;
  WeylOptions wo;
  wo.samples = p.weyl_samples;
  wo.horizons = p.weyl_horizons;
  wo.frequencies = 4;
  wo.seed = derive_seed(p.seed, 1200);
  const NormalityReport rep = weyl_sums(golden.ifs(), Base::of_integer(2), wo);
  std::vector<CheckResult> out;
  const int Kmax = p.weyl_horizons.back();
  for (int m = 1; m <= 4; ++m) {
    bool decreasing = true;
    std::ostringstream os;
    double prev = INFINITY;
    for (int K : p.weyl_horizons) {
      const double v = rep.find(m, K)->mean_abs;
      if (!(v < prev)) decreasing = false;
      prev = v;
      os << (os.tellp() > 0 ? ";" : "") << "K" << K << "=" << fmt(v);
    }
    CheckResult r = make(11, golden.name(), "mean_weyl_m" + std::to_string(m));
    r.value = rep.find(m, Kmax)->mean_abs;
    r.threshold = 5.0 / std::sqrt(static_cast<double>(Kmax));
    r.depth = rep.depth;
    r.resolution = static_cast<int>(rep.precision);
    r.seconds = sw.seconds();
    r.pass = decreasing && r.value <= r.threshold;
    r.detail = os.str() + " samples=" + std::to_string(p.weyl_samples);
    out.push_back(r);
  }
  const HypothesisReport hg = hypothesis_check(golden.ifs(), Base::of_integer(2));
  const HypothesisReport hd = hypothesis_check(dyadic.ifs(), Base::of_integer(4));
  CheckResult h = make(11, dyadic.name(), "hypothesis_rho_half_s4_flagged");
  h.value = hd.holds() ? 0.0 : 1.0;
  h.threshold = 1.0;
  h.pass = !hd.holds() && !hd.irrational_ok() && hg.holds();
  std::ostringstream os;
  os << "s=4:" << (hd.ratios.empty() ? std::string("?") : hd.ratios[0].method) << " relation=" << (hd.ratios.empty() ? 0 : hd.ratios[0].p) << "/"
     << (hd.ratios.empty() ? 0 : hd.ratios[0].q) << " | golden s=2 holds=" << (hg.holds() ? "yes" : "no");
  h.detail = os.str();
  h.seconds = sw.seconds();
  out.push_back(h);
  for (auto& r : out) r.pass = r.pass && sw.seconds() < 900.0;
  return out;
}

std::vector<CheckResult> run_suite(std::vector<SystemContext*> systems, const VerifyProfile& p, bool log_progress) {
  auto find = [&](const std::string& name) -> SystemContext* {
    for (SystemContext* s : systems)
      if (s->name() == name) return s;
    return nullptr;
  };
  SystemContext* ss = find("strong_separation");
  SystemContext* dy = find("dyadic");
  SystemContext* go = find("golden_bc");
  std::vector<CheckResult> all;
  auto add = [&](std::vector<CheckResult> rs) {
    for (auto& r : rs) {
      if (log_progress)
        std::cerr << "  [" << (r.pass ? "pass" : "FAIL") << "] " << r.criterion << " " << r.system << " " << r.metric << " = " << fmt(r.value)
                  << " (" << fmt(r.seconds) << " s)\n";
      all.push_back(std::move(r));
    }
  };
  if (go) add(check_exact_overlap(*go));
  {
    std::vector<SystemContext*> cl;
    for (SystemContext* s : {ss, dy, go})
      if (s) cl.push_back(s);
    add(check_closure(cl, p));
  }
  for (SystemContext* s : {ss, dy, go})
    if (s) add(check_lemma_maximal(*s, p));
  for (SystemContext* s : {ss, dy, go})
    if (s) add(check_b0(*s));
  for (SystemContext* s : {dy, go})
    if (s) add(check_weights_dp(*s, p));
  for (SystemContext* s : {ss, dy, go})
    if (s) add(check_reconstruction(*s, p));
  if (go) add(check_zoom_trend(*go, p));
  if (go) add(check_qn(*go, p));
  for (SystemContext* s : {ss, dy, go})
    if (s) add(check_uniform_scaling(*s, p));
  for (SystemContext* s : {ss, dy, go})
    if (s) add(check_return_asymptotics(*s, p));
  if (go && dy) add(check_normality(*go, *dy, p));
  return all;
}

std::string results_csv(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  os << "criterion,system,metric,value,threshold,pass,depth,resolution,dt,detail\n";
  for (const CheckResult& r : results) {
    std::string detail = r.detail, metric = r.metric;
    std::replace(detail.begin(), detail.end(), ',', ';');
    std::replace(metric.begin(), metric.end(), ',', ';');
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%.10g,%.10g,%d,%d,%d,%.10g,", r.criterion, r.system.c_str(), metric.c_str(), r.value,
                  r.threshold, r.pass ? 1 : 0, r.depth, r.resolution, r.dt);
    os << buf << '"' << detail << "\"\n";
  }
  return os.str();
}

}  // namespace wsc
