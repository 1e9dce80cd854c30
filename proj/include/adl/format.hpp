#pragma once

#include <string>

namespace adl {

/// Shortest decimal text that parses back to exactly `v` (locale independent).
std::string format_double(double v);

/// Fixed-point text with `digits` decimals (locale independent).
std::string format_fixed(double v, int digits);

}  // namespace adl
