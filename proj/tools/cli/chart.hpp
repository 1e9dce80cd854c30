#pragma once

#include <string>

#include "adl/eval.hpp"

namespace adl::cli {

/// Two-panel SVG for one dataset: mean reconstruction error vs size rate
/// (left) and mean accuracy vs size rate (right), one polyline per method.
/// Output depends only on the report contents.
std::string render_trend_svg(const EvaluationReport& report, const std::string& dataset);

}  // namespace adl::cli
