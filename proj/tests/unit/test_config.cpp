#include <doctest.h>

#include "support.hpp"
#include "wsc/config.hpp"
#include "wsc/measure.hpp"
#include "wsc/neighbourhood.hpp"
#include "wsc/scenery.hpp"

using namespace wsc;
using testing_support::bundled;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text, "t");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kPlane = R"(name: gasket
dim: 2
map: ratio = 1/3 ; translation = 0 | 0   ; prob = 1/3
map: ratio = 1/3 ; translation = 2/3 | 0 ; prob = 1/3
map: ratio = 1/3 ; translation = 0 | 2/3 ; prob = 1/3
)";

}  // namespace

TEST_CASE("bundled configs load") {
  CHECK(bundled("dyadic").name == "dyadic");
  CHECK(bundled("golden_bc").system.field()->degree() == 2);
  CHECK(config_hash(bundled("dyadic").text) == config_hash(bundled("dyadic").text));
  CHECK(config_hash("a") != config_hash("b"));
  // the echo parses back to the same normalized system
  const SystemConfig& g = bundled("golden_bc");
  const SystemConfig again = parse_config(format_config(g.name, g.system));
  for (int j = 0; j < g.system.size(); ++j) CHECK(again.system.map(j).to_string() == g.system.map(j).to_string());
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("name: x\nbogus: 1\n") == 2);
  CHECK(error_line("dim: 1\nmap: ratio = 1/2 ; translation = 0 ; prob = 1/2\nmap: ratio = 1/2 ; translation = 1/2\n") == 3);
  CHECK(error_line("dim: 1\nmap: ratio = 3/2 ; translation = 0 ; prob = 1\nmap: ratio = 1/2 ; translation = 0 ; prob = 0\n") == 2);
  CHECK(error_line("minpoly: -1 1 1\nroot_interval: -2 1\nmap: ratio = 0 1 ; translation = 0 ; prob = 1\n") == 2);
  CHECK(error_line("minpoly: -1 1 x\n") == 1);
  CHECK(error_line("dim: 4\n") == 1);
  CHECK(error_line("dim: 2\nmap: ratio = 1/2 ; translation = 0 ; prob = 1\n") == 2);
  CHECK(error_line("map: ratio = 1/2 ; translation = 0 ; prob = 1/2\nmap: ratio = 1/2 ; translation = 1/2 ; prob = 1/3\n") >= 1);
  CHECK_THROWS_AS(load_config("/nonexistent/file.wsc"), ConfigError);
}

TEST_CASE("a planar system runs through the exact and numerical layers") {
  const SystemConfig cfg = parse_config(kPlane, "gasket");
  const IFS& ifs = cfg.system;
  CHECK(ifs.dim() == 2);
  Automaton aut(ifs);
  const AutomatonReport r = aut.explore(1000, 50);
  CHECK(r.closed);
  for (const Word& w : {Word{0}, Word{1, 2}, Word{2, 0, 1}}) {
    const WeightedSystem dp = aut.weights(w), bf = brute_force_weighted(ifs, w);
    CHECK(dp.base == bf.base);
    CHECK(dp.weights == bf.weights);
  }
  const AtomicMeasure mu = approx_measure(ifs, 7);
  CHECK(mu.total_mass() == doctest::Approx(1.0));
  const AtomicMeasure z = zoom(mu, {0, 0, 0}, std::log(3.0), 2.0);
  CHECK(z.total_mass() == doctest::Approx(1.0));
  // zoom at the fixed point of the first map reproduces the measure
  CHECK(w1_quantized(z, approx_measure(ifs, 6), 32) <= std::sqrt(2.0) / 32 + 1e-9);
  SceneryEngine engine(aut);
  const Word i = sample_word(ifs, 200, 4);
  const std::vector<double> times{0.0, 1.0, 2.0};
  for (const auto& f : engine.frames(i, times)) CHECK(f.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
}
