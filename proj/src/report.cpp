#include "fogsim/report.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <sstream>

namespace fogsim {

std::optional<ReportFormat> report_format_from_string(const std::string& s) {
    if (s == "table") return ReportFormat::table;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    return std::nullopt;
}

std::string format_number(double value) {
    std::array<char, 64> buffer{};
    auto [end, ec] =
        std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                      std::chars_format::general, 6);
    return std::string(buffer.data(), end);
}

namespace {

constexpr std::array<const char*, 6> kColumns = {
    "strategy", "dt_seconds", "ml_seconds", "dc_seconds", "total_seconds", "dc_bytes"};

std::array<std::string, 6> row_cells(const StrategyResult& r) {
    return {r.strategy,
            format_number(r.cost.dt_seconds),
            format_number(r.cost.ml_seconds),
            format_number(r.cost.dc_seconds),
            format_number(r.cost.total_seconds),
            format_number(r.cost.dc_bytes)};
}

}  // namespace

std::string render_report(const std::vector<StrategyResult>& results, ReportFormat format) {
    if (format == ReportFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : results) {
            rows.push_back(nlohmann::json{{"strategy", r.strategy},
                                          {"dt_seconds", r.cost.dt_seconds},
                                          {"ml_seconds", r.cost.ml_seconds},
                                          {"dc_seconds", r.cost.dc_seconds},
                                          {"total_seconds", r.cost.total_seconds},
                                          {"dc_bytes", r.cost.dc_bytes}});
        }
        return rows.dump(2) + "\n";
    }

    if (format == ReportFormat::csv) {
        std::ostringstream out;
        for (std::size_t c = 0; c < kColumns.size(); ++c)
            out << (c ? "," : "") << kColumns[c];
        out << "\n";
        for (const auto& r : results) {
            const auto cells = row_cells(r);
            for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
            out << "\n";
        }
        return out.str();
    }

    // aligned text table
    std::array<std::size_t, 6> widths{};
    for (std::size_t c = 0; c < kColumns.size(); ++c) widths[c] = std::string(kColumns[c]).size();
    std::vector<std::array<std::string, 6>> rows;
    rows.reserve(results.size());
    for (const auto& r : results) {
        rows.push_back(row_cells(r));
        for (std::size_t c = 0; c < widths.size(); ++c)
            widths[c] = std::max(widths[c], rows.back()[c].size());
    }

    std::ostringstream out;
    auto emit = [&](const std::array<std::string, 6>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << "  ";
            // left-align the strategy name, right-align the numbers
            if (c == 0)
                out << cells[c] << std::string(widths[c] - cells[c].size(), ' ');
            else
                out << std::string(widths[c] - cells[c].size(), ' ') << cells[c];
        }
        out << "\n";
    };
    std::array<std::string, 6> header;
    for (std::size_t c = 0; c < kColumns.size(); ++c) header[c] = kColumns[c];
    emit(header);
    for (const auto& row : rows) emit(row);
    return out.str();
}

}  // namespace fogsim
