#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "wsc/scenery.hpp"
#include "wsc/verify.hpp"

using namespace wsc;

TEST_CASE("results csv keeps ten fields per row") {
  CheckResult a;
  a.criterion = 10;
  a.system = "dyadic";
  a.metric = "birkhoff_" + TestFunctional{Functional::cylinder, Word{1, 0}}.name();
  a.detail = "n=1000, sd=0.5";
  CheckResult b = a;
  b.metric = "x,y";
  b.seconds = 12.0;
  const std::string csv = results_csv({a, b});
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    // fields are split by commas outside the quoted detail
    const std::string head = line.substr(0, line.find('"'));
    CHECK(std::count(head.begin(), head.end(), ',') == 9);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(csv.find("cyl[2 1]") != std::string::npos);
  // wall time stays out of the table
  CHECK(results_csv({a}) == results_csv({[&] { CheckResult c = a; c.seconds = 99.0; return c; }()}));
}
