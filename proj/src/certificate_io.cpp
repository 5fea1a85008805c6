#include "wsc/certificate_io.hpp"

#include <sstream>
#include <stdexcept>

namespace wsc {

std::string format_certificate(const std::string& system, const B0Certificate& cert, const ZetaCoefficients* zeta) {
  std::ostringstream os;
  os << "# b0-certificate v1\n";
  os << "system: " << system << "\n";
  os << "complete: " << (cert.complete ? 1 : 0) << "\n";
  if (!cert.complete) os << "failure: " << cert.failure << "\n";
  os << "a0: " << format_word(cert.a0) << "\n";
  os << "b0: " << format_word(cert.b0) << "\n";
  os << "disjointness_depth: " << cert.disjointness_depth << "\n";
  for (int f = 0; f < cert.n0.size(); ++f) os << "member: " << f << " " << cert.n0.maps[static_cast<std::size_t>(f)].to_string() << "\n";
  for (std::size_t h = 0; h < cert.family.size(); ++h) os << "family: " << cert.family[h] << " " << format_word(cert.b_h[h]) << "\n";
  if (zeta) {
    for (std::size_t h = 0; h < zeta->coef.size(); ++h) {
      os << "coef: " << h;
      for (const auto& c : zeta->coef[h]) os << " " << c.get_str();
      os << "\n";
    }
    for (std::size_t h = 0; h < zeta->c_h.size(); ++h) os << "C_h: " << h << " " << zeta->c_h[h].get_str() << "\n";
  }
  return os.str();
}

B0Certificate parse_certificate(const std::string& text, const IFS& ifs, const GeomOptions& geom) {
  B0Certificate cert;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> members;
  bool have_a0 = false;
  auto fail = [&](const std::string& msg) { throw std::runtime_error("certificate:" + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected 'key: value'");
    const std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    try {
      if (key == "a0") {
        cert.a0 = parse_word(value, ifs.size());
        have_a0 = true;
      } else if (key == "b0") {
        cert.b0 = parse_word(value, ifs.size());
      } else if (key == "complete") {
        cert.complete = value == "1";
      } else if (key == "failure") {
        cert.failure = value;
      } else if (key == "disjointness_depth") {
        cert.disjointness_depth = std::stoi(value);
      } else if (key == "member") {
        const auto sp = value.find(' ');
        if (sp == std::string::npos || std::stoi(value.substr(0, sp)) != static_cast<int>(members.size())) fail("members out of order");
        members.push_back(value.substr(sp + 1));
      } else if (key == "family") {
        const auto sp = value.find(' ');
        cert.family.push_back(std::stoi(value.substr(0, sp)));
        cert.b_h.push_back(parse_word(sp == std::string::npos ? "" : value.substr(sp + 1), ifs.size()));
      } else if (key != "system" && key != "coef" && key != "C_h") {
        fail("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (!have_a0) fail("missing a0");
  cert.n0 = neighbourhood_system(ifs, cert.a0, geom);
  if (static_cast<int>(members.size()) != cert.n0.size()) fail("recorded N0 has " + std::to_string(members.size()) + " members, N(a0) has " + std::to_string(cert.n0.size()));
  for (std::size_t f = 0; f < members.size(); ++f)
    if (members[f] != cert.n0.maps[f].to_string()) fail("member " + std::to_string(f) + " differs from N(a0)");
  for (int h : cert.family)
    if (h < 0 || h >= cert.n0.size()) fail("family index out of range");
  return cert;
}

}  // namespace wsc
