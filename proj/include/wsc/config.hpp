#pragma once

// Line-based system description:
//
//   name: golden_bc
//   minpoly: -1 1 1           integer coefficients, constant term first
//   root_interval: 1/2 1      rational isolating interval
//   dim: 1
//   map: ratio = 0 1 ; translation = 1 -1 ; prob = 1/2
//
// Field elements are written as power-basis coefficient lists; coordinates of
// a translation are separated by '|'. '#' starts a comment.

#include <stdexcept>
#include <string>

#include "wsc/ifs.hpp"

namespace wsc {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, int line, const std::string& msg)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SystemConfig {
  std::string name;
  std::string source;  // file path or "<string>"
  std::string text;
  IFS raw;
  IFS system;  // normalized
};

SystemConfig parse_config(const std::string& text, const std::string& where = "<string>");
SystemConfig load_config(const std::string& path);

/// FNV-1a of the config text, as hex.
std::string config_hash(const std::string& text);

/// Echo of a system in the config syntax (normalized coordinates).
std::string format_config(const std::string& name, const IFS& ifs);

}  // namespace wsc
