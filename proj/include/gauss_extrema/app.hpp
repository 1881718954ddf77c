#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gx {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Report {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Side information (cache hits, truncation counts); never part of the rendered table.
    std::vector<std::string> notes;

    std::size_t column(const std::string& name) const;
};

// Text of a cell without CSV quoting: 17 significant digits, empty for missing.
std::string format_cell(const Cell& c);

enum class ReportFormat { Csv, Json };
ReportFormat parse_report_format(const std::string& s);

std::string render_csv(const Report& r);
std::string render_json(const Report& r);
std::string render(const Report& r, ReportFormat f);

struct RunOverrides {
    std::optional<std::string> kind;  // if set, the config kind must match
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
};

struct OutputSpec {
    std::string path;  // empty: caller decides (stdout for the CLI)
    ReportFormat format = ReportFormat::Csv;
};

struct RunResult {
    Report report;
    OutputSpec output;
};

// Parses and validates a JSON experiment config, then runs it. ConfigError
// carries the key path of the offending entry.
RunResult run_experiment(const std::string& config_text, const RunOverrides& overrides = {});

}  // namespace gx
