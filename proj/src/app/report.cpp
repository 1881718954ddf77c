#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "gauss_extrema/app.hpp"
#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"

namespace gx {

std::size_t Report::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("report has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw ConfigError("output.format: expected csv or json, got '" + s + "'");
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

std::string format_cell(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    return {};
}

std::string render_csv(const Report& r) {
    std::string out;
    for (std::size_t k = 0; k < r.columns.size(); ++k) out += (k ? "," : "") + csv_field(r.columns[k]);
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + csv_field(format_cell(row[k]));
        out += '\n';
    }
    return out;
}

std::string render_json(const Report& r) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto& c = row[k];
            auto& slot = obj[r.columns[k]];
            if (std::holds_alternative<double>(c)) {
                const double x = std::get<double>(c);
                slot = std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(format_double(x));
            } else if (std::holds_alternative<std::int64_t>(c)) {
                slot = std::get<std::int64_t>(c);
            } else if (std::holds_alternative<std::string>(c)) {
                slot = std::get<std::string>(c);
            } else {
                slot = nullptr;
            }
        }
        rows.push_back(std::move(obj));
    }
    nlohmann::ordered_json doc;
    doc["kind"] = r.kind;
    doc["columns"] = r.columns;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render(const Report& r, ReportFormat f) { return f == ReportFormat::Csv ? render_csv(r) : render_json(r); }

}  // namespace gx
