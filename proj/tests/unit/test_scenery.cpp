#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wsc/scenery.hpp"

using namespace wsc;
using testing_support::bundled;

namespace {

struct Setup {
  std::unique_ptr<Automaton> aut;
  std::unique_ptr<SceneryEngine> engine;
  B0Certificate cert;
  ZetaCoefficients zeta;
  Word window;
};

Setup& setup(const std::string& name) {
  static std::map<std::string, Setup> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  Setup s;
  s.aut = std::make_unique<Automaton>(bundled(name).system);
  const AutomatonReport r = s.aut->explore(10000, 400);
  const Word a0 = find_a0(r);
  s.cert = construct_b0(s.aut->ifs(), a0, neighbourhood_system(s.aut->ifs(), a0));
  s.zeta = compute_zeta_coefficients(s.aut->ifs(), s.cert);
  s.window = a0;
  s.window.insert(s.window.end(), s.cert.b0.begin(), s.cert.b0.end());
  s.engine = std::make_unique<SceneryEngine>(*s.aut);
  return cache.emplace(name, std::move(s)).first->second;
}

double unit(const IFS& ifs) { return -std::log(ifs.ratio_max()); }

}  // namespace

TEST_CASE("trajectory frame count and normalization") {
  Setup& s = setup("golden_bc");
  const IFS& ifs = s.aut->ifs();
  const double T = 4 * unit(ifs), dt = unit(ifs) / 4;
  const Word i = sample_word(ifs, s.engine->required_length({}, T), 3);
  const SceneryTrajectory tr = scenery_trajectory(*s.engine, i, T, dt);
  CHECK(tr.frames.size() == static_cast<std::size_t>(std::floor(T / dt + 1e-9)) + 1);
  for (const auto& f : tr.frames) {
    CHECK(f.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::fabs(f.coord[0][k]) <= 1.0 + 1e-9);
  }
  const EmpiricalDistribution d = empirical_tangent_distribution(tr);
  CHECK(d.members.size() == tr.frames.size());
  const SceneryTrajectory one = scenery_trajectory(*s.engine, i, 0.0, dt);
  CHECK(one.frames.size() == 1);
}

TEST_CASE("frames agree with zooms of a deep approximation") {
  Setup& s = setup("golden_bc");
  const IFS& ifs = s.aut->ifs();
  const AtomicMeasure mu = approx_measure(ifs, 21);
  const Word i = sample_word(ifs, 400, 8);
  const std::vector<double> times{0.0, 1.0, 2.0, 4.0};
  const auto frames = s.engine->frames(i, times);
  const Vec3 x = project_point_double(ifs, i);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(w1_line(frames[k], zoom(mu, x, times[k])) < 5e-3);
}

TEST_CASE("fixed point periodicity") {
  // at i = 1,1,1,... frames repeat with period log(1/rho_1) once the window
  // lies inside the first cylinder's ball
  for (const char* name : {"dyadic", "strong_separation"}) {
    Setup& s = setup(name);
    const IFS& ifs = s.aut->ifs();
    const Word i(400, 0);
    const double u = unit(ifs);
    const std::vector<double> times{u, 2 * u, 3 * u, 4 * u};
    const auto frames = s.engine->frames(i, times);
    for (std::size_t k = 1; k < frames.size(); ++k) CHECK(w1_line(frames[k], frames[0]) <= 2.0 / kSignatureCells);
    SceneryTrajectory tr = scenery_trajectory(*s.engine, i, 4 * u, u);
    tr.frames.erase(tr.frames.begin());
    tr.times.erase(tr.times.begin());
    const EmpiricalDistribution d = empirical_tangent_distribution(tr);
    EmpiricalDistribution single;
    single.members = {frames[0]};
    single.weights = {1.0};
    CHECK(distribution_distance(d, single) <= 4.0 / kSignatureCells);
  }
}

TEST_CASE("return times") {
  Setup& s = setup("dyadic");
  const IFS& ifs = s.aut->ifs();
  // one planted visit
  Word i(300, 0);
  std::copy(s.window.begin(), s.window.end(), i.begin() + 50);
  const ReturnTimeRecord r = return_times(*s.engine, i, s.window);
  REQUIRE(r.t.size() == 1);
  CHECK(r.t[0] == 50 + s.window.size());
  CHECK_THROWS_AS(return_times(*s.engine, Word(300, 0), s.window), MeasureError);

  // visit frequency over 10^6 symbols
  const Word w = sample_word(ifs, 1000000, 77);
  const ReturnTimeRecord all = return_times(*s.engine, w, s.window);
  const double p = ifs.word_prob_double(s.window);
  const double n = static_cast<double>(all.length);
  const double freq = static_cast<double>(all.t.size()) / n;
  // overlapping occurrences inflate the variance; 3 sigma of the Bernoulli count still bounds it here
  CHECK(std::fabs(freq - p) <= 3.0 * std::sqrt(p * (1 - p) * 3 / n));
  const double M = *std::max_element(all.alpha0.begin(), all.alpha0.end());
  for (std::size_t k = 0; k + 1 < all.r.size(); ++k) {
    CHECK(all.r[k + 1] - all.r[k] >= unit(ifs) - M - 1e-12);
    CHECK(all.tau[k] == all.t[k + 1] - all.t[k]);
  }
}

TEST_CASE("Birkhoff averages") {
  Setup& s = setup("golden_bc");
  const IFS& ifs = s.aut->ifs();
  ReturnTimeRecord r;
  const Word i = sample_with_visits(*s.engine, s.window, 801, 5, r);
  const BirkhoffResult one = birkhoff_average(i, r, {Functional::one, {}}, 800);
  CHECK(one.mean == 1.0);
  for (double v : one.partial) CHECK(v == 1.0);
  // eta: the average gap equals (r_n - r_0)/n
  const std::size_t n = 400;
  const BirkhoffResult eta = birkhoff_average(i, r, {Functional::eta, {}}, n);
  CHECK(eta.mean == doctest::Approx((r.r[n] - r.r[0]) / static_cast<double>(n)).epsilon(1e-12));
  const BirkhoffResult eta2 = birkhoff_average(i, r, {Functional::eta, {}}, 2 * n);
  CHECK(std::fabs(r.r[n] / n - r.r[2 * n] / (2.0 * n)) <= 5.0 / std::sqrt(static_cast<double>(n)) * eta2.sd);
  const BirkhoffResult cyl = birkhoff_average(i, r, {Functional::cylinder, Word{0}}, 800);
  CHECK(std::fabs(cyl.mean - 0.5) <= 3.0 * cyl.sd / std::sqrt(800.0));
  (void)ifs;
}

TEST_CASE("Q_n weights and fidelity") {
  for (const char* name : {"strong_separation", "dyadic", "golden_bc"}) {
    Setup& s = setup(name);
    ReturnTimeRecord r;
    const Word i = sample_with_visits(*s.engine, s.window, 31, 21, r);
    QnOptions o;
    o.n = 30;
    const EmpiricalDistribution q = assemble_qn(*s.engine, s.cert, s.zeta, i, r, o);
    const EmpiricalDistribution d = direct_average(*s.engine, i, r, o);
    double t = 0.0;
    for (double w : q.weights) t += w;
    CHECK(t == doctest::Approx(1.0));
    for (const auto& m : q.members) CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(distribution_distance(q, d) <= 0.1);
    o.frames = QnFrames::reference;
    CHECK(distribution_distance(assemble_qn(*s.engine, s.cert, s.zeta, i, r, o), d) <= 0.1);
  }
}

TEST_CASE("strong separation: reference frames equal mu frames") {
  Setup& s = setup("strong_separation");
  ReturnTimeRecord r;
  const Word i = sample_with_visits(*s.engine, s.window, 4, 2, r);
  QnOptions o;
  o.n = 3;
  const EmpiricalDistribution a = assemble_qn(*s.engine, s.cert, s.zeta, i, r, o);
  o.frames = QnFrames::reference;
  const EmpiricalDistribution b = assemble_qn(*s.engine, s.cert, s.zeta, i, r, o);
  REQUIRE(a.members.size() == b.members.size());
  for (std::size_t k = 0; k < a.members.size(); ++k) CHECK(w1_line(a.members[k], b.members[k]) <= 2.0 / kSignatureCells);
}

TEST_CASE("distribution distance axioms") {
  Setup& s = setup("dyadic");
  const IFS& ifs = s.aut->ifs();
  std::vector<EmpiricalDistribution> ds;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const double T = 3 * unit(ifs);
    const Word i = sample_word(ifs, s.engine->required_length({}, T), 100 + seed);
    ds.push_back(empirical_tangent_distribution(scenery_trajectory(*s.engine, i, T, unit(ifs) / 4)));
  }
  CHECK(distribution_distance(ds[0], ds[0]) == doctest::Approx(0.0).scale(1));
  CHECK(distribution_distance(ds[0], ds[1]) == doctest::Approx(distribution_distance(ds[1], ds[0])).epsilon(1e-9));
  CHECK(distribution_distance(ds[0], ds[2]) <= distribution_distance(ds[0], ds[1]) + distribution_distance(ds[1], ds[2]) + 1e-9);
  EmpiricalDistribution a, b;
  a.members = {ds[0].members[0]};
  b.members = {ds[1].members[3]};
  a.weights = b.weights = {1.0};
  CHECK(distribution_distance(a, b) == doctest::Approx(w1_line(a.members[0], b.members[0])).epsilon(2.0 / kSignatureCells));
}

TEST_CASE("convergence report is deterministic and trends down") {
  Setup& s = setup("dyadic");
  ConvergenceOptions o;
  o.points = 4;
  o.T_units = {5.0, 20.0};
  o.seed = 9;
  const ConvergenceReport a = convergence_report(*s.engine, o), b = convergence_report(*s.engine, o);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].distance == b.rows[k].distance);
  CHECK(a.median_pair[1] < a.median_pair[0]);
}

TEST_CASE("thinning and high-level iteration") {
  CHECK(thin_indices(5, 0).size() == 5);
  const auto t = thin_indices(1000, 200);
  CHECK(t.size() == 200);
  CHECK(t.front() == 0);
  CHECK(t.back() == 999);
  const IFS& g = bundled("golden_bc").system;
  const IFS h = high_level_iteration(g, 3);
  CHECK(h.size() == 8);
  CHECK(h.map(3) == compose_word(g, Word{0, 1, 1}));
  CHECK(h.probs()[3] == mpq_class(1, 8));
}
