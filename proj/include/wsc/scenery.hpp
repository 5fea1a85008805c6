#pragma once

// Scenery flow along symbolic codings, return times to the a0 b0 window, the
// block decomposition Q_n and distances between empirical distributions of
// frames.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wsc/measure.hpp"
#include "wsc/neighbourhood.hpp"

namespace wsc {

struct SceneryOptions {
  DepthPolicy policy;
  int tail_symbols = 100;  // symbols used to evaluate pi of a tail
};

/// Measure the engine zooms into: sum_f w_f (f mu) over the members of a state,
/// optionally restricted to B(0,1) before the first symbol is read.
struct FrameSource {
  int state = 0;
  std::vector<double> weights{1.0};
  bool clip_root = false;
};

/// Frames of a measure along i, computed in the frame of the longest prefix
/// i|k whose ball B_{i|k} contains the window. Components and weights come
/// from the automaton and its transfer entries.
class SceneryEngine {
 public:
  explicit SceneryEngine(Automaton& automaton, SceneryOptions opt = {});

  Automaton& automaton() { return automaton_; }
  const IFS& ifs() const { return automaton_.ifs(); }
  const SceneryOptions& options() const { return opt_; }

  /// Frames at nondecreasing times t >= 0 (normalized on B(0,1)).
  std::vector<AtomicMeasure> frames(std::span<const Symbol> i, std::span<const double> times,
                                    const FrameSource& source = {});
  /// Shortest |i| that the given maximal time needs.
  std::size_t required_length(std::span<const Symbol> i, double t_max);

  Vec3 tail_point(std::span<const Symbol> tail) const;
  /// -log(1 - |pi(tail)|)
  double alpha0(std::span<const Symbol> tail) const;

 private:
  const std::vector<FloatMap>& float_state(int id);

  Automaton& automaton_;
  SceneryOptions opt_;
  std::vector<std::vector<FloatMap>> cache_;
  std::vector<char> cached_;
};

struct SceneryTrajectory {
  Word word;
  Vec3 x{0, 0, 0};
  std::vector<double> times;
  std::vector<AtomicMeasure> frames;
};

/// Frames at t = 0, dt, ..., (floor(T/dt)) dt; with a member cap the times are
/// thinned uniformly (the first and last grid points are kept).
SceneryTrajectory scenery_trajectory(SceneryEngine& engine, std::span<const Symbol> i, double T, double dt,
                                     std::size_t cap = 0);

/// Evenly spaced indices of 0..n-1, at most cap of them (all when cap = 0 or n <= cap).
std::vector<std::size_t> thin_indices(std::size_t n, std::size_t cap);

struct ReturnTimeRecord {
  Word window;                     // a0 b0
  std::vector<std::size_t> t;      // visit positions k: i|k ends with the window
  std::vector<std::size_t> tau;    // gaps t[n+1] - t[n]
  std::vector<double> alpha0;      // alpha0(sigma^{t_n} i)
  std::vector<double> log_ratio;   // log(1/rho_{i|t_n})
  std::vector<double> r;           // log_ratio + alpha0
  std::size_t length = 0;          // symbols scanned
};

/// Visits up to |i| - tail_symbols (so that alpha0 is resolved at every visit).
ReturnTimeRecord return_times(const SceneryEngine& engine, std::span<const Symbol> i, std::span<const Symbol> window,
                              std::size_t max_visits = 0);

/// Sampled word with at least `visits` visits of the window. The length starts
/// at about 1.5 visits / p(window) and doubles until enough visits occur.
Word sample_with_visits(SceneryEngine& engine, std::span<const Symbol> window, std::size_t visits, std::uint64_t seed,
                        ReturnTimeRecord& record);

enum class Functional { one, eta, cylinder };

struct TestFunctional {
  Functional kind = Functional::one;
  Word cylinder;  // for Functional::cylinder: indicator of sigma^{t_n} i in [cylinder]
  std::string name() const;
};

struct BirkhoffResult {
  std::vector<double> values;    // g(sigma^{t_k} i), k < n
  std::vector<double> partial;   // running averages
  double mean = 0.0;
  double sd = 0.0;
};

/// g evaluated along visits; eta uses consecutive visits, so n is one less
/// than the visit count for it.
BirkhoffResult birkhoff_average(std::span<const Symbol> i, const ReturnTimeRecord& record, const TestFunctional& g,
                                std::size_t n = 0);

struct EmpiricalDistribution {
  std::vector<AtomicMeasure> members;
  std::vector<double> weights;
  std::vector<double> times;  // global time of each member when known
};

EmpiricalDistribution empirical_tangent_distribution(const SceneryTrajectory& traj);

enum class QnFrames {
  self,       // mu zoomed at sigma^{t_k} i
  reference,  // (zeta(i|t_k) d nu) zoomed at sigma^{t_k} i
};

struct QnOptions {
  std::size_t n = 30;
  double dt = 0.0;       // 0: log(1/rho_max) / 8
  std::size_t cap = 200;
  QnFrames frames = QnFrames::self;
};

/// Q_n on the global grid {j dt} restricted to [r_0, r_n]. The word must be
/// long enough for the last block (see return_times).
EmpiricalDistribution assemble_qn(SceneryEngine& engine, const B0Certificate& cert, const ZetaCoefficients& zeta,
                                  std::span<const Symbol> i, const ReturnTimeRecord& record, const QnOptions& opt);

/// Direct scenery of mu along i on the same global grid over [0, r_n].
EmpiricalDistribution direct_average(SceneryEngine& engine, std::span<const Symbol> i, const ReturnTimeRecord& record,
                                     const QnOptions& opt);

/// Weights lambda_f = sum_h q_h coef[h][f] of the reference measure at the
/// visit `visit` (q from the weights at the prefix of length t - |b0|), normalized.
std::vector<double> reference_weights(Automaton& automaton, const B0Certificate& cert, const ZetaCoefficients& zeta,
                                      std::span<const Symbol> prefix);

/// Ground-cost signature of a frame: cumulative masses on a fixed fine grid.
struct FrameSignature {
  int dim = 1;
  std::vector<double> cdf;  // d = 1
  AtomicMeasure atoms;      // d >= 2
};

constexpr int kSignatureCells = 4096;  // cells on [-1,1]; ground-cost error <= 2/kSignatureCells
FrameSignature frame_signature(const AtomicMeasure& m);
double signature_w1(const FrameSignature& a, const FrameSignature& b, int resolution = 8);

/// Nested optimal transport: W1 over the base metric W1, after uniform
/// thinning of each distribution to at most cap members.
double distribution_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b, std::size_t cap = 200);
double distribution_distance(std::span<const FrameSignature> a, std::span<const double> wa,
                             std::span<const FrameSignature> b, std::span<const double> wb);

/// Re-blocking over Gamma^level (maps phi_a for |a| = level).
IFS high_level_iteration(const IFS& ifs, int level);

struct ConvergenceRow {
  std::string kind;  // pair, self, qn
  int index = 0;
  double T = 0.0;
  double distance = 0.0;
};

struct ConvergenceOptions {
  int points = 10;
  std::vector<double> T_units{5.0, 20.0};  // multiples of log(1/rho_max)
  double dt = 0.0;
  std::size_t cap = 200;
  std::uint64_t seed = 1;
  bool self_distance = true;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<double> median_pair;  // per entry of T_units
  std::vector<double> median_self;
  double dt = 0.0;
};

ConvergenceReport convergence_report(SceneryEngine& engine, const ConvergenceOptions& opt);

double median(std::vector<double> v);

}  // namespace wsc
