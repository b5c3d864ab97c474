#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fogsim/model.hpp"

namespace fogsim {

enum class ReportFormat { table, csv, json };

std::optional<ReportFormat> report_format_from_string(const std::string& s);

struct StrategyResult {
    std::string strategy;
    CostBreakdown cost;
};

/// Formats numbers with up to six significant digits, locale-independent.
std::string format_number(double value);

/// Renders strategy results in input order. csv columns are exactly
/// strategy,dt_seconds,ml_seconds,dc_seconds,total_seconds,dc_bytes; the
/// table carries the same columns aligned for reading; json is an array of
/// objects with those keys and exact (round-trippable) numbers.
std::string render_report(const std::vector<StrategyResult>& results, ReportFormat format);

}  // namespace fogsim
