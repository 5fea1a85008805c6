#pragma once

// Text form of a b0 certificate. The file carries the words and the exact
// coefficients; reloading rebuilds N0 from a0 and checks the members against
// the recorded ones before anything else uses it.

#include <string>

#include "wsc/neighbourhood.hpp"

namespace wsc {

std::string format_certificate(const std::string& system, const B0Certificate& cert, const ZetaCoefficients* zeta = nullptr);

/// Throws std::runtime_error (with the line number) on malformed input or when
/// the recorded N0 differs from N(a0).
B0Certificate parse_certificate(const std::string& text, const IFS& ifs, const GeomOptions& geom = {});

}  // namespace wsc
