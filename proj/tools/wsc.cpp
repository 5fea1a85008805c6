// Command line front end: one subcommand per pipeline stage, each writing a CSV
// table (or text artifact) plus a JSON manifest into --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "wsc/certificate_io.hpp"
#include "wsc/config.hpp"
#include "wsc/kernels.hpp"
#include "wsc/measure.hpp"
#include "wsc/neighbourhood.hpp"
#include "wsc/normality.hpp"
#include "wsc/scenery.hpp"
#include "wsc/verify.hpp"

#ifndef WSC_VERSION
#define WSC_VERSION "0.0.0"
#endif
#ifndef WSC_CONFIG_DIR
#define WSC_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace wsc;

namespace {

enum Exit { kOk = 0, kConfig = 2, kBudget = 3, kCheck = 4 };

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Common {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 20240601;
  int max_states = 10000;
  int max_depth = 400;
  std::string backend = "auto";
};

// Collects artifacts and stage timings for the manifest of one run.
class Run {
 public:
  Run(std::string subcommand, const Common& c) : sub_(std::move(subcommand)), c_(c) {
    manifest_["tool"] = "wsc";
    manifest_["version"] = WSC_VERSION;
    manifest_["subcommand"] = sub_;
    manifest_["seed"] = c.seed;
    manifest_["backend"] = kernels::backend_name(kernels::active_backend());
  }

  void set_config(const SystemConfig& cfg) {
    manifest_["config"] = {{"path", cfg.source}, {"name", cfg.name}, {"hash", config_hash(cfg.text)}};
  }
  json& manifest() { return manifest_; }

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] { timings_[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }

  void write(const std::string& file, const std::string& content) {
    fs::create_directories(c_.out);
    std::ofstream os(fs::path(c_.out) / file, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + (fs::path(c_.out) / file).string());
    manifest_["tables"].push_back(file);
  }

  void finish() {
    json t = json::object();
    for (const auto& [k, v] : timings_) t[k] = v;
    manifest_["timings"] = t;
    fs::create_directories(c_.out);
    std::ofstream os(fs::path(c_.out) / (sub_ + ".manifest.json"));
    os << manifest_.dump(2) << "\n";
  }

 private:
  std::string sub_;
  Common c_;
  json manifest_;
  std::map<std::string, double> timings_;
};

SystemConfig load(const Common& c, Run& run) {
  if (c.config.empty()) throw ConfigError("<cli>", 0, "a config file is required (--config)");
  SystemConfig cfg = load_config(c.config);
  run.set_config(cfg);
  return cfg;
}

const AutomatonReport& closed_report(Automaton& aut, const Common& c, Run& run, AutomatonReport& storage) {
  storage = run.stage("explore", [&] { return aut.explore(c.max_states, c.max_depth); });
  if (!storage.closed) {
    std::ostringstream os;
    os << "maximal system not certified: automaton open after " << storage.states.size() << " states, frontier depth "
       << storage.frontier_depth << " (raise --max-states or --max-depth)";
    throw BudgetError(os.str());
  }
  return storage;
}

struct Pipeline {
  AutomatonReport report;
  Word a0;
  NeighbourhoodSystem n0;
  B0Certificate cert;
  ZetaCoefficients zeta;
};

Pipeline certified(Automaton& aut, const Common& c, Run& run, bool need_zeta = true) {
  Pipeline p;
  closed_report(aut, c, run, p.report);
  p.a0 = find_a0(p.report);
  p.n0 = neighbourhood_system(aut.ifs(), p.a0, aut.geom());
  p.cert = run.stage("b0", [&] { return construct_b0(aut.ifs(), p.a0, p.n0, {}, aut.geom()); });
  if (!p.cert.complete) throw BudgetError("b0 construction incomplete: " + p.cert.failure);
  if (need_zeta) p.zeta = run.stage("zeta", [&] { return compute_zeta_coefficients(aut.ifs(), p.cert); });
  return p;
}

Word window_of(const B0Certificate& cert) {
  Word w = cert.a0;
  w.insert(w.end(), cert.b0.begin(), cert.b0.end());
  return w;
}

double unit(const IFS& ifs) { return -std::log(ifs.ratio_max()); }

// --- subcommands -----------------------------------------------------------

int cmd_validate(const Common& c) {
  Run run("validate", c);
  const SystemConfig cfg = load(c, run);
  std::cout << format_config(cfg.name, cfg.system);
  std::ostringstream csv;
  csv << "map,ratio,translation,prob,depth,resolution,dt\n";
  for (int j = 0; j < cfg.system.size(); ++j) {
    const Similarity& m = cfg.system.map(j);
    std::string t;
    for (std::size_t k = 0; k < m.translation.size(); ++k) t += (k ? "|" : "") + m.translation[k].to_string();
    csv << j + 1 << ",\"" << m.ratio.to_string() << "\",\"" << t << "\"," << cfg.system.probs()[static_cast<std::size_t>(j)].get_str()
        << ",0,0,0\n";
  }
  run.write("validate.csv", csv.str());
  run.manifest()["depths"] = json::object();
  run.finish();
  return kOk;
}

int cmd_wsc_report(const Common& c) {
  Run run("wsc-report", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  const AutomatonReport rep = run.stage("explore", [&] { return aut.explore(c.max_states, c.max_depth); });
  std::ostringstream txt, csv;
  txt << "system: " << cfg.name << "\nclosed: " << (rep.closed ? "true" : "false") << "\nstates: " << rep.states.size()
      << "\nmax_cardinality: " << rep.max_cardinality << "\nfrontier_depth: " << rep.frontier_depth << "\n";
  csv << "state,word,word_depth,cardinality,unknown,interior,depth,resolution,dt\n";
  for (const auto& s : rep.states) {
    txt << "state " << s.id << " word=" << (s.word.empty() ? "-" : format_word(s.word)) << " cardinality=" << s.cardinality;
    if (s.interior) txt << " interior=" << *s.interior;
    if (s.unknown) txt << " unknown=" << s.unknown;
    txt << "\n";
    csv << s.id << ",\"" << format_word(s.word) << "\"," << s.depth << "," << s.cardinality << "," << s.unknown << ","
        << (s.interior ? std::to_string(*s.interior) : "") << "," << aut.geom().depth << ",0,0\n";
  }
  for (std::size_t e = 0; e < rep.edge_keys.size(); ++e)
    txt << "edge " << rep.edge_keys[e][0] << " --" << rep.edge_keys[e][1] + 1 << "--> " << rep.edge_targets[e] << "\n";
  std::cout << txt.str();
  run.write("wsc-report.txt", txt.str());
  run.write("wsc-report.csv", csv.str());
  run.manifest()["depths"] = {{"cover", aut.geom().depth}, {"max_depth", c.max_depth}};
  run.finish();
  if (!rep.closed) {
    std::cerr << "error: automaton not closed within the budget (raise --max-states or --max-depth)\n";
    return kBudget;
  }
  return kOk;
}

int cmd_find_a0(const Common& c) {
  Run run("find-a0", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  AutomatonReport rep;
  closed_report(aut, c, run, rep);
  const Word a0 = find_a0(rep);
  const NeighbourhoodSystem n0 = neighbourhood_system(cfg.system, a0, aut.geom());
  std::ostringstream csv;
  csv << "member,map,depth,resolution,dt\n";
  for (int f = 0; f < n0.size(); ++f) csv << f << ",\"" << n0.maps[static_cast<std::size_t>(f)].to_string() << "\"," << aut.geom().depth << ",0,0\n";
  std::cout << "a0: " << format_word(a0) << "\n|N0|: " << n0.size() << "\n";
  run.write("find-a0.csv", csv.str());
  run.manifest()["a0"] = format_word(a0);
  run.finish();
  return kOk;
}

int cmd_b0_cert(const Common& c, const std::string& check) {
  Run run("b0-cert", c);
  const SystemConfig cfg = load(c, run);
  if (!check.empty()) {
    std::ifstream in(check);
    if (!in) throw ConfigError(check, 0, "cannot open certificate");
    std::stringstream ss;
    ss << in.rdbuf();
    B0Certificate cert;
    try {
      cert = parse_certificate(ss.str(), cfg.system);
    } catch (const std::runtime_error& e) {
      throw CheckFailure(e.what());
    }
    const CertificateCheck chk = run.stage("recheck", [&] { return recheck_certificate(cfg.system, cert); });
    std::cout << "identities: " << chk.identities << "\nneighbourhoods: " << chk.neighbourhoods << "\ndisjointness: " << chk.disjointness
              << "\n";
    for (const auto& m : chk.messages) std::cout << "  " << m << "\n";
    std::ostringstream csv;
    csv << "claim,ok,depth,resolution,dt\nidentities," << chk.identities << "," << cert.disjointness_depth << ",0,0\nneighbourhoods,"
        << chk.neighbourhoods << "," << cert.disjointness_depth << ",0,0\ndisjointness," << chk.disjointness << "," << cert.disjointness_depth
        << ",0,0\n";
    run.write("b0-check.csv", csv.str());
    run.finish();
    if (!chk.ok() || !cert.complete) throw CheckFailure("certificate rejected");
    return kOk;
  }
  Automaton aut(cfg.system);
  const Pipeline p = certified(aut, c, run);
  const std::string text = format_certificate(cfg.name, p.cert, &p.zeta);
  std::cout << text;
  run.write("b0-cert.txt", text);
  run.manifest()["depths"] = {{"disjointness", p.cert.disjointness_depth}};
  run.finish();
  return kOk;
}

int cmd_weights(const Common& c, const std::string& word) {
  Run run("weights", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  const Word w = parse_word(word, cfg.system.size());
  const WeightedSystem ws = run.stage("dp", [&] { return aut.weights(w); });
  const auto nw = ws.normalized();
  std::ostringstream csv;
  csv << "member,map,weight,normalized,weight_double,depth,resolution,dt\n";
  for (int f = 0; f < ws.base.size(); ++f) {
    const auto fi = static_cast<std::size_t>(f);
    csv << f << ",\"" << ws.base.maps[fi].to_string() << "\"," << ws.weights[fi].get_str() << "," << nw[fi].get_str() << ","
        << num(ws.weights[fi].get_d()) << "," << w.size() << ",0,0\n";
  }
  std::cout << csv.str();
  run.write("weights.csv", csv.str());
  run.manifest()["depths"] = {{"word", w.size()}};
  run.finish();
  return kOk;
}

int cmd_nu_build(const Common& c, int depth, int resolution) {
  Run run("nu-build", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  const Pipeline p = certified(aut, c, run);
  if (depth <= 0) depth = static_cast<int>(std::ceil(std::log(resolution * 256.0) / unit(cfg.system)));
  const AtomicMeasure nu = run.stage("nu", [&] { return build_reference_nu(cfg.system, p.n0, depth); });
  run.write("nu.txt", export_measure(nu));
  std::ostringstream csv;
  csv << "h,cell_centre,zeta,empty,depth,resolution,dt\n";
  for (std::size_t h = 0; h < p.zeta.coef.size(); ++h) {
    std::vector<double> row;
    for (const auto& v : p.zeta.coef[h]) row.push_back(v.get_d());
    const GridDensity g = zeta_density(nu, row, resolution);
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      const double centre = -1.0 + (static_cast<double>(k) + 0.5) / resolution;
      csv << h << "," << num(centre) << "," << num(g.values[k]) << "," << (g.empty[k] ? 1 : 0) << "," << depth << "," << resolution << ",0\n";
    }
    if (cfg.system.dim() != 1) break;
  }
  if (cfg.system.dim() == 1) run.write("zeta.csv", csv.str());
  std::cout << "nu: " << nu.size() << " atoms, depth " << depth << ", |N0| " << p.n0.size() << "\n";
  run.manifest()["depths"] = {{"nu", depth}};
  run.manifest()["resolutions"] = {{"zeta", resolution}};
  run.finish();
  return kOk;
}

int cmd_scenery(const Common& c, double T_units, double dt, int resolution, const std::string& word) {
  Run run("scenery", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  SceneryEngine engine(aut);
  const double T = T_units * unit(cfg.system);
  if (dt <= 0) dt = unit(cfg.system) / 8.0;
  Word i = word.empty() ? sample_word(cfg.system, engine.required_length({}, T), c.seed) : parse_word(word, cfg.system.size());
  const SceneryTrajectory traj = run.stage("scenery", [&] { return scenery_trajectory(engine, i, T, dt); });
  std::ostringstream csv;
  csv << "t,atoms,w1_to_previous,tv_to_previous,depth,resolution,dt\n";
  const int depth = engine.options().policy.extra_levels;
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    const double w1 = k ? measure_distance(DistanceKind::w1, traj.frames[k], traj.frames[k - 1], resolution) : 0.0;
    const double tv = k ? tv_grid(traj.frames[k], traj.frames[k - 1], resolution) : 0.0;
    csv << num(traj.times[k]) << "," << traj.frames[k].size() << "," << num(w1) << "," << num(tv) << "," << depth << "," << resolution << ","
        << num(dt) << "\n";
  }
  run.write("scenery.csv", csv.str());
  std::ostringstream grid;
  grid << "t,cell,mass,depth,resolution,dt\n";
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    const GridDensity g = render_grid(traj.frames[k], resolution);
    for (std::size_t j = 0; j < g.values.size(); ++j)
      grid << num(traj.times[k]) << "," << j << "," << num(g.values[j]) << "," << depth << "," << resolution << "," << num(dt) << "\n";
  }
  run.write("scenery_grid.csv", grid.str());
  std::cout << "frames: " << traj.frames.size() << " over [0," << num(T) << "] dt=" << num(dt) << "\n";
  run.manifest()["depths"] = {{"extra_levels", depth}, {"word", i.size()}};
  run.manifest()["resolutions"] = {{"grid", resolution}};
  run.manifest()["dt"] = dt;
  run.finish();
  return kOk;
}

int cmd_return_times(const Common& c, std::size_t visits) {
  Run run("return-times", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  const Pipeline p = certified(aut, c, run, false);
  SceneryEngine engine(aut);
  ReturnTimeRecord rec;
  const Word i = run.stage("sample", [&] { return sample_with_visits(engine, window_of(p.cert), visits + 1, c.seed, rec); });
  std::ostringstream csv;
  csv << "n,t,tau,alpha0,log_ratio,r,depth,resolution,dt\n";
  for (std::size_t n = 0; n < rec.t.size(); ++n)
    csv << n << "," << rec.t[n] << "," << (n < rec.tau.size() ? std::to_string(rec.tau[n]) : "") << "," << num(rec.alpha0[n]) << ","
        << num(rec.log_ratio[n]) << "," << num(rec.r[n]) << "," << engine.options().tail_symbols << ",0,0\n";
  run.write("return-times.csv", csv.str());
  std::ostringstream bk;
  bk << "functional,n,mean,sd,exact,depth,resolution,dt\n";
  const double pw = cfg.system.word_prob_double(window_of(p.cert));
  for (const TestFunctional& g : {TestFunctional{Functional::eta, {}}, TestFunctional{Functional::cylinder, Word{0}},
                                  TestFunctional{Functional::cylinder, Word{1, 0}}}) {
    const BirkhoffResult b = birkhoff_average(i, rec, g, visits);
    const double exact = g.kind == Functional::eta ? (cfg.system.equicontractive() ? unit(cfg.system) / pw : NAN)
                                                   : cfg.system.word_prob_double(g.cylinder);
    bk << g.name() << "," << visits << "," << num(b.mean) << "," << num(b.sd) << "," << num(exact) << "," << engine.options().tail_symbols
       << ",0,0\n";
  }
  std::cout << bk.str();
  run.write("birkhoff.csv", bk.str());
  run.manifest()["window"] = format_word(window_of(p.cert));
  run.manifest()["depths"] = {{"tail_symbols", engine.options().tail_symbols}, {"word", i.size()}};
  run.finish();
  return kOk;
}

int cmd_tangent_dist(const Common& c, std::size_t n, double dt) {
  Run run("tangent-dist", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  const Pipeline p = certified(aut, c, run);
  SceneryEngine engine(aut);
  ReturnTimeRecord rec;
  const Word i = run.stage("sample", [&] { return sample_with_visits(engine, window_of(p.cert), n + 1, c.seed, rec); });
  QnOptions qo;
  qo.n = n;
  qo.dt = dt;
  const EmpiricalDistribution direct = run.stage("direct", [&] { return direct_average(engine, i, rec, qo); });
  const EmpiricalDistribution qs = run.stage("qn", [&] { return assemble_qn(engine, p.cert, p.zeta, i, rec, qo); });
  qo.frames = QnFrames::reference;
  const EmpiricalDistribution qr = run.stage("qn", [&] { return assemble_qn(engine, p.cert, p.zeta, i, rec, qo); });
  const double used_dt = dt > 0 ? dt : unit(cfg.system) / 8.0;
  const double d_self = run.stage("distance", [&] { return distribution_distance(qs, direct); });
  const double d_ref = run.stage("distance", [&] { return distribution_distance(qr, direct); });
  const int depth = engine.options().policy.extra_levels;
  std::ostringstream csv;
  csv << "comparison,n,r_n,members,distance,depth,resolution,dt\n";
  csv << "qn_self_vs_direct," << n << "," << num(rec.r[n]) << "," << qs.members.size() << "," << num(d_self) << "," << depth << ","
      << kSignatureCells / 2 << "," << num(used_dt) << "\n";
  csv << "qn_reference_vs_direct," << n << "," << num(rec.r[n]) << "," << qr.members.size() << "," << num(d_ref) << "," << depth << ","
      << kSignatureCells / 2 << "," << num(used_dt) << "\n";
  std::cout << csv.str();
  run.write("tangent-dist.csv", csv.str());
  run.manifest()["depths"] = {{"extra_levels", depth}, {"word", i.size()}};
  run.manifest()["resolutions"] = {{"signature_cells", kSignatureCells}};
  run.manifest()["dt"] = used_dt;
  run.finish();
  return kOk;
}

int cmd_converge(const Common& c, int points, std::vector<double> Ts, double dt) {
  Run run("converge", c);
  const SystemConfig cfg = load(c, run);
  Automaton aut(cfg.system);
  SceneryEngine engine(aut);
  ConvergenceOptions co;
  co.points = points;
  co.T_units = std::move(Ts);
  co.dt = dt;
  co.seed = c.seed;
  const ConvergenceReport rep = run.stage("converge", [&] { return convergence_report(engine, co); });
  const int depth = engine.options().policy.extra_levels;
  std::ostringstream csv;
  csv << "kind,index,T,distance,depth,resolution,dt\n";
  for (const auto& r : rep.rows)
    csv << r.kind << "," << r.index << "," << num(r.T) << "," << num(r.distance) << "," << depth << "," << kSignatureCells / 2 << ","
        << num(rep.dt) << "\n";
  for (std::size_t k = 0; k < co.T_units.size(); ++k) {
    const double T = co.T_units[k] * unit(cfg.system);
    csv << "median_pair,-1," << num(T) << "," << num(rep.median_pair[k]) << "," << depth << "," << kSignatureCells / 2 << "," << num(rep.dt) << "\n";
    if (!rep.median_self.empty())
      csv << "median_self,-1," << num(T) << "," << num(rep.median_self[k]) << "," << depth << "," << kSignatureCells / 2 << "," << num(rep.dt)
          << "\n";
  }
  std::cout << csv.str();
  run.write("converge.csv", csv.str());
  run.manifest()["depths"] = {{"extra_levels", depth}};
  run.manifest()["resolutions"] = {{"signature_cells", kSignatureCells}};
  run.manifest()["dt"] = rep.dt;
  run.finish();
  return kOk;
}

int cmd_normality(const Common& c, const std::string& base, int samples, std::vector<int> horizons, int freqs) {
  Run run("normality", c);
  const SystemConfig cfg = load(c, run);
  Base s;
  try {
    s = Base::parse(base);
  } catch (const NormalityError& e) {
    throw ConfigError("--base", 0, e.what());
  }
  const HypothesisReport hyp = run.stage("hypothesis", [&] { return hypothesis_check(cfg.system, s); });
  std::cout << "base: " << s.describe() << "\npisot: " << (hyp.pisot.pisot ? "yes" : "no") << " (" << hyp.pisot.reason << ")\n";
  for (const auto& r : hyp.ratios) {
    std::cout << "ratio " << r.ratio << ": ";
    if (r.relation_found) std::cout << "log s / log rho = " << r.p << "/" << r.q;
    else if (r.suspected) std::cout << "suspected relation " << r.p << "/" << r.q;
    else if (r.decided) std::cout << "no rational relation";
    else std::cout << "none up to height " << r.bound;
    std::cout << " [" << r.method << "]\n";
  }
  std::cout << "hypothesis holds: " << (hyp.holds() ? "yes" : "no") << "\n";
  json hj = json::array();
  for (const auto& r : hyp.ratios)
    hj.push_back({{"ratio", r.ratio}, {"relation_found", r.relation_found}, {"p", r.p}, {"q", r.q}, {"suspected", r.suspected},
                  {"decided", r.decided}, {"method", r.method}});
  run.manifest()["hypothesis"] = {{"base", s.describe()}, {"pisot", hyp.pisot.pisot}, {"irrational_ok", hyp.irrational_ok()},
                                  {"holds", hyp.holds()}, {"ratios", hj}};
  if (!s.integer) {
    run.finish();
    std::cerr << "note: Weyl sums are computed for integer bases only\n";
    return kOk;
  }
  WeylOptions wo;
  wo.samples = samples;
  wo.horizons = std::move(horizons);
  wo.frequencies = freqs;
  wo.seed = c.seed;
  NormalityReport rep;
  try {
    rep = run.stage("weyl", [&] { return weyl_sums(cfg.system, s, wo); });
  } catch (const NormalityError& e) {
    throw BudgetError(std::string(e.what()) + " (lower the horizons, or raise the depth budget)");
  }
  std::ostringstream csv;
  csv << "kind,m,K,mean,sd,depth,resolution,dt\n";
  for (const auto& w : rep.weyl)
    csv << "weyl," << w.m << "," << w.K << "," << num(w.mean_abs) << "," << num(w.sd_abs) << "," << rep.depth << "," << rep.precision << ",0\n";
  for (const auto& d : rep.discrepancy) csv << "discrepancy,0," << d.K << "," << num(d.mean) << ",," << rep.depth << "," << rep.precision << ",0\n";
  std::cout << csv.str();
  run.write("normality.csv", csv.str());
  run.manifest()["depths"] = {{"symbols", rep.depth}};
  run.manifest()["resolutions"] = {{"digits", rep.precision}};
  run.finish();
  return kOk;
}

int cmd_verify(const Common& c, const std::string& profile, const std::string& dir, const std::vector<std::string>& only) {
  Run run("verify", c);
  VerifyProfile p = profile == "quick" ? VerifyProfile::quick() : VerifyProfile::full();
  if (profile != "quick" && profile != "full") throw ConfigError("--profile", 0, "expected quick or full");
  p.seed = c.seed;
  std::vector<std::unique_ptr<SystemContext>> owned;
  std::vector<SystemContext*> systems;
  json cfgs = json::array();
  for (const char* name : {"strong_separation", "dyadic", "golden_bc"}) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    SystemConfig cfg = load_config((fs::path(dir) / (std::string(name) + ".wsc")).string());
    cfgs.push_back({{"name", cfg.name}, {"path", cfg.source}, {"hash", config_hash(cfg.text)}});
    owned.push_back(std::make_unique<SystemContext>(std::move(cfg)));
    systems.push_back(owned.back().get());
  }
  run.manifest()["configs"] = cfgs;
  run.manifest()["profile"] = p.name;
  const auto results = run.stage("suite", [&] { return run_suite(systems, p, true); });
  run.write("verify.csv", results_csv(results));
  json t = json::object();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    const std::string key = std::to_string(r.criterion) + "/" + r.system + "/" + r.metric;
    t[key] = r.seconds;
  }
  run.manifest()["check_seconds"] = t;
  run.finish();
  std::cout << (all ? "all checks passed" : "some checks FAILED") << " (" << results.size() << " checks)\n";
  return all ? kOk : kCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak separation, scenery and normality diagnostics for self-similar measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WSC_VERSION);
  Common c;
  auto common = [&](CLI::App* s, bool config = true) {
    if (config) s->add_option("config,--config", c.config, "system config file")->required();
    s->add_option("--out", c.out, "output directory")->capture_default_str();
    s->add_option("--seed", c.seed, "random seed")->capture_default_str();
    s->add_option("--max-states", c.max_states, "automaton state budget")->capture_default_str();
    s->add_option("--max-depth", c.max_depth, "automaton depth budget")->capture_default_str();
    s->add_option("--backend", c.backend, "kernel backend: auto, scalar, avx2")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "parse, validate and echo the normalized system");
  common(validate);
  auto* report = app.add_subcommand("wsc-report", "explore the neighbourhood automaton");
  common(report);
  auto* a0 = app.add_subcommand("find-a0", "word realizing the maximal neighbourhood system");
  common(a0);
  std::string check;
  auto* b0 = app.add_subcommand("b0-cert", "construct (or --check) the b0 certificate");
  common(b0);
  b0->add_option("--check", check, "recheck a saved certificate instead of constructing one");
  std::string word;
  auto* weights = app.add_subcommand("weights", "exact weights of N(a)");
  common(weights);
  weights->add_option("--word", word, "word a, 1-based symbols, comma separated")->required();
  int nu_depth = 0, resolution = 16;
  auto* nu = app.add_subcommand("nu-build", "reference measure nu and zeta densities");
  common(nu);
  nu->add_option("--depth", nu_depth, "atom depth (0: from the resolution)");
  nu->add_option("--resolution", resolution, "grid cells per unit length")->capture_default_str();
  double T = 20.0, dt = 0.0;
  auto* scen = app.add_subcommand("scenery", "frames of mu along one point");
  common(scen);
  scen->add_option("--T", T, "horizon in units of log(1/rho_max)")->capture_default_str();
  scen->add_option("--dt", dt, "time step (0: log(1/rho_max)/8)");
  scen->add_option("--resolution", resolution, "grid cells per unit length")->capture_default_str();
  scen->add_option("--word", word, "coding of the point (default: sampled)");
  std::size_t visits = 1000;
  auto* rt = app.add_subcommand("return-times", "visits to the a0 b0 window and Birkhoff averages");
  common(rt);
  rt->add_option("--visits", visits, "number of visits n")->capture_default_str();
  std::size_t qn = 30;
  auto* td = app.add_subcommand("tangent-dist", "Q_n against the direct scenery average");
  common(td);
  td->add_option("--n", qn, "blocks n")->capture_default_str();
  td->add_option("--dt", dt, "time step (0: log(1/rho_max)/8)");
  int points = 10;
  std::vector<double> Ts{5.0, 20.0};
  auto* conv = app.add_subcommand("converge", "pairwise and self distances of time averages");
  common(conv);
  conv->add_option("--points", points, "point pairs")->capture_default_str();
  conv->add_option("--T", Ts, "horizons in units of log(1/rho_max)");
  conv->add_option("--dt", dt, "time step (0: log(1/rho_max)/8)");
  std::string base = "2";
  int samples = 64, freqs = 4;
  std::vector<int> horizons{256, 1024, 4096};
  auto* norm = app.add_subcommand("normality", "Weyl sums of s^k x for mu-typical x");
  common(norm);
  norm->add_option("--base", base, "base s: integer or poly:c0,c1,...@lo,hi")->capture_default_str();
  norm->add_option("--samples", samples, "sample points")->capture_default_str();
  norm->add_option("--K", horizons, "horizons");
  norm->add_option("--frequencies", freqs, "largest frequency m")->capture_default_str();
  std::string profile = "full", dir = WSC_CONFIG_DIR;
  std::vector<std::string> only;
  auto* ver = app.add_subcommand("verify", "run the property suite on the bundled systems");
  common(ver, false);
  ver->add_option("--profile", profile, "quick or full")->capture_default_str();
  ver->add_option("--configs", dir, "directory with the bundled configs")->capture_default_str();
  ver->add_option("--system", only, "restrict to these systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : kConfig;
  }

  try {
    if (c.backend == "scalar") kernels::force_backend(kernels::Backend::scalar);
    else if (c.backend == "avx2") {
      if (!kernels::avx2_available()) throw ConfigError("--backend", 0, "avx2 is not available on this machine");
      kernels::force_backend(kernels::Backend::avx2);
    } else if (c.backend != "auto") throw ConfigError("--backend", 0, "expected auto, scalar or avx2");

    if (*validate) return cmd_validate(c);
    if (*report) return cmd_wsc_report(c);
    if (*a0) return cmd_find_a0(c);
    if (*b0) return cmd_b0_cert(c, check);
    if (*weights) return cmd_weights(c, word);
    if (*nu) return cmd_nu_build(c, nu_depth, resolution);
    if (*scen) return cmd_scenery(c, T, dt, resolution, word);
    if (*rt) return cmd_return_times(c, visits);
    if (*td) return cmd_tangent_dist(c, qn, dt);
    if (*conv) return cmd_converge(c, points, Ts, dt);
    if (*norm) return cmd_normality(c, base, samples, horizons, freqs);
    if (*ver) return cmd_verify(c, profile, dir, only);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FieldError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const MeasureError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
