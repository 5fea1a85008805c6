#include "wsc/config.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace wsc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char c) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == c) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct RawMap {
  int line;
  std::string ratio, translation, prob;
};

}  // namespace

std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemConfig parse_config(const std::string& text, const std::string& where) {
  std::optional<std::vector<mpz_class>> minpoly;
  std::optional<std::pair<mpq_class, mpq_class>> interval;
  int minpoly_line = 0, interval_line = 0;
  int dim = 1, dim_line = 0;
  std::string name = "system";
  bool normalize = true;
  std::vector<RawMap> maps;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ConfigError(where, lineno, "expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    const std::string val = trim(line.substr(colon + 1));
    try {
      if (key == "name") {
        name = val;
      } else if (key == "minpoly") {
        std::vector<mpz_class> c;
        for (const auto& t : split_ws(val)) {
          mpz_class z;
          if (z.set_str(t, 10) != 0) throw ConfigError(where, lineno, "minpoly coefficient '" + t + "' is not an integer");
          c.push_back(z);
        }
        if (c.size() < 2) throw ConfigError(where, lineno, "minpoly needs degree >= 1");
        minpoly = c;
        minpoly_line = lineno;
      } else if (key == "root_interval") {
        const auto t = split_ws(val);
        if (t.size() != 2) throw ConfigError(where, lineno, "root_interval takes two rationals");
        interval = std::make_pair(parse_rational(t[0]), parse_rational(t[1]));
        interval_line = lineno;
      } else if (key == "dim") {
        dim = std::stoi(val);
        dim_line = lineno;
        if (dim < 1 || dim > 3) throw ConfigError(where, lineno, "dim must be 1, 2 or 3");
      } else if (key == "normalize") {
        if (val == "yes" || val == "true") normalize = true;
        else if (val == "no" || val == "false") normalize = false;
        else throw ConfigError(where, lineno, "normalize must be yes or no");
      } else if (key == "map") {
        RawMap m{lineno, "", "", ""};
        for (const auto& part : split_on(val, ';')) {
          if (part.empty()) continue;
          const auto eq = part.find('=');
          if (eq == std::string::npos) throw ConfigError(where, lineno, "map field '" + part + "' lacks '='");
          const std::string k = trim(part.substr(0, eq)), v = trim(part.substr(eq + 1));
          if (k == "ratio") m.ratio = v;
          else if (k == "translation") m.translation = v;
          else if (k == "prob") m.prob = v;
          else throw ConfigError(where, lineno, "unknown map field '" + k + "'");
        }
        if (m.ratio.empty() || m.translation.empty() || m.prob.empty())
          throw ConfigError(where, lineno, "map needs ratio, translation and prob");
        maps.push_back(m);
      } else {
        throw ConfigError(where, lineno, "unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where, lineno, e.what());
    }
  }
  (void)dim_line;

  FieldPtr field;
  if (minpoly) {
    if (!interval) throw ConfigError(where, minpoly_line, "minpoly given without root_interval");
    try {
      field = AlgebraicField::create(*minpoly, interval->first, interval->second);
    } catch (const std::exception& e) {
      throw ConfigError(where, interval_line ? interval_line : minpoly_line, e.what());
    }
  } else {
    if (interval) throw ConfigError(where, interval_line, "root_interval given without minpoly");
    field = AlgebraicField::rationals();
  }
  if (maps.empty()) throw ConfigError(where, lineno, "no maps given");

  auto parse_element = [&](const std::string& s, int ln) {
    std::vector<mpq_class> c;
    for (const auto& t : split_ws(s)) c.push_back(parse_rational(t));
    if (c.empty() || static_cast<int>(c.size()) > field->degree())
      throw ConfigError(where, ln, "field element '" + s + "' needs 1.." + std::to_string(field->degree()) + " coefficients");
    return FieldElement(field, c);
  };

  std::vector<Similarity> sims;
  std::vector<mpq_class> probs;
  for (const auto& m : maps) {
    try {
      Similarity s;
      s.ratio = parse_element(m.ratio, m.line);
      const auto coords = split_on(m.translation, '|');
      if (static_cast<int>(coords.size()) != dim)
        throw ConfigError(where, m.line, "translation has " + std::to_string(coords.size()) + " coordinates, dim is " + std::to_string(dim));
      for (const auto& c : coords) s.translation.push_back(parse_element(c, m.line));
      sims.push_back(std::move(s));
      probs.push_back(parse_rational(m.prob));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where, m.line, e.what());
    }
  }
  try {
    IFS raw(field, dim, sims, probs);
    IFS sys = normalize ? normalize_ifs(raw) : raw;
    return {name, where, text, std::move(raw), std::move(sys)};
  } catch (const std::exception& e) {
    throw ConfigError(where, maps.front().line, e.what());
  }
}

SystemConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string format_config(const std::string& name, const IFS& ifs) {
  std::ostringstream os;
  const auto& f = ifs.field();
  os << "name: " << name << "\n";
  if (f->degree() > 1) {
    os << "minpoly:";
    for (const auto& c : f->minpoly()) os << " " << c.get_str();
    const auto& iv = f->isolating_interval();
    os << "\nroot_interval: " << rational_to_string(iv.lo) << " " << rational_to_string(iv.hi) << "\n";
  }
  os << "dim: " << ifs.dim() << "\nnormalize: no\n";
  for (int i = 0; i < ifs.size(); ++i) {
    const auto& m = ifs.map(i);
    os << "map: ratio = " << m.ratio.to_string() << " ; translation = ";
    for (int k = 0; k < ifs.dim(); ++k) os << (k ? " | " : "") << m.translation[static_cast<std::size_t>(k)].to_string();
    os << " ; prob = " << rational_to_string(ifs.probs()[static_cast<std::size_t>(i)]) << "\n";
  }
  return os.str();
}

}  // namespace wsc
