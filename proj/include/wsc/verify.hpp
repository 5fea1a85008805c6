#pragma once

// End-to-end property checks over bundled systems. Shared by the `verify`
// subcommand and the acceptance binary.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wsc/config.hpp"
#include "wsc/measure.hpp"
#include "wsc/neighbourhood.hpp"
#include "wsc/scenery.hpp"

namespace wsc {

struct CheckResult {
  int criterion = 0;
  std::string system;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  int depth = 0;
  int resolution = 0;
  double dt = 0.0;
  std::string detail;
  double seconds = 0.0;  // wall time; never written to CSV
};

struct VerifyProfile {
  std::string name = "full";
  int lemma_trials = 100;
  int brute_len_dyadic = 8;
  int brute_len_golden = 10;
  int dp_len = 8;
  int recon_samples = 20;
  int recon_resolution = 16;
  int trend_points = 30;
  int trend_resolution = 16;
  std::size_t qn_n = 30;
  int scaling_pairs = 10;
  std::size_t return_visits = 1000;
  std::size_t return_visits_second = 4000;
  int weyl_samples = 64;
  std::vector<int> weyl_horizons{256, 1024, 4096};
  std::uint64_t seed = 20240601;

  static VerifyProfile full();
  static VerifyProfile quick();
};

/// System with its lazily computed automaton, N0, certificate and zeta data.
class SystemContext {
 public:
  explicit SystemContext(SystemConfig cfg, GeomOptions geom = {});

  const SystemConfig& config() const { return cfg_; }
  const std::string& name() const { return cfg_.name; }
  const IFS& ifs() const { return cfg_.system; }
  Automaton& automaton() { return *automaton_; }
  const AutomatonReport& report();
  const Word& a0();
  const NeighbourhoodSystem& n0();
  const B0Certificate& certificate();
  const ZetaCoefficients& zeta();
  Word window();  // a0 b0
  SceneryEngine& engine();

 private:
  SystemConfig cfg_;
  GeomOptions geom_;
  std::unique_ptr<Automaton> automaton_;
  std::optional<AutomatonReport> report_;
  std::optional<Word> a0_;
  std::optional<NeighbourhoodSystem> n0_;
  std::optional<B0Certificate> cert_;
  std::optional<ZetaCoefficients> zeta_;
  std::unique_ptr<SceneryEngine> engine_;
};

/// Grid of the normalized restriction of phi_a^-1 mu to B(0,1), by a float
/// depth-first search over all words from the root (no automaton, no merging).
GridDensity direct_magnification_grid(const IFS& ifs, std::span<const Symbol> a, int extra_levels, int resolution);

std::vector<CheckResult> check_exact_overlap(SystemContext& golden);
std::vector<CheckResult> check_closure(std::vector<SystemContext*> systems, const VerifyProfile& p);
std::vector<CheckResult> check_lemma_maximal(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_b0(SystemContext& s);
std::vector<CheckResult> check_weights_dp(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_reconstruction(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_zoom_trend(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_qn(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_uniform_scaling(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_return_asymptotics(SystemContext& s, const VerifyProfile& p);
std::vector<CheckResult> check_normality(SystemContext& golden, SystemContext& dyadic, const VerifyProfile& p);

/// Runs criteria 1-11 over the contexts (identified by name: strong_separation,
/// dyadic, golden_bc; missing systems skip their checks).
std::vector<CheckResult> run_suite(std::vector<SystemContext*> systems, const VerifyProfile& p, bool log_progress = false);

/// CSV with depth/resolution/dt columns; deterministic for a fixed profile.
std::string results_csv(const std::vector<CheckResult>& results);

}  // namespace wsc
