#pragma once

#include <map>
#include <random>
#include <string>

#include "wsc/config.hpp"

namespace testing_support {

inline wsc::FieldPtr golden_field() {
  return wsc::AlgebraicField::create({-1, 1, 1}, mpq_class(1, 2), mpq_class(1));
}

inline const wsc::SystemConfig& bundled(const std::string& name) {
  static std::map<std::string, wsc::SystemConfig> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, wsc::load_config(std::string(WSC_CONFIG_DIR) + "/" + name + ".wsc")).first;
  return it->second;
}

// Small rational with numerator and denominator bounded by `bound`.
inline mpq_class random_rational(std::mt19937_64& g, int bound = 20) {
  std::uniform_int_distribution<int> num(-bound, bound), den(1, bound);
  mpq_class q(num(g), den(g));
  q.canonicalize();
  return q;
}

inline wsc::FieldElement random_element(std::mt19937_64& g, const wsc::FieldPtr& f, int bound = 20) {
  std::vector<mpq_class> c;
  for (int k = 0; k < f->degree(); ++k) c.push_back(random_rational(g, bound));
  return wsc::FieldElement(f, c);
}

inline wsc::Word random_word(std::mt19937_64& g, int alphabet, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  wsc::Word w(len(g));
  for (auto& s : w) s = static_cast<wsc::Symbol>(sym(g));
  return w;
}

}  // namespace testing_support
