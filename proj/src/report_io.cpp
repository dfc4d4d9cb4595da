#include "ampere/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ampere/error.hpp"

namespace ampere {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
    return csv_field(std::get<std::string>(c));
}

// JSON has no NaN; non-finite reals become null.
nlohmann::json real_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json quantity_json(const Quantity& q) {
    if (const auto* d = std::get_if<double>(&q)) return real_json(*d);
    const auto& v = std::get<Vector3>(q);
    return nlohmann::json::array({real_json(v.x), real_json(v.y), real_json(v.z)});
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_text(row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const Table& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        obj[table.columns[i]] = real_json(v);
                    else
                        obj[table.columns[i]] = v;
                },
                row[i]);
        }
        rows.push_back(std::move(obj));
    }
    return {{"columns", table.columns}, {"rows", rows}};
}

nlohmann::json to_json(const ConvergenceReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"scale", real_json(r.scale)},
                        {"measured", quantity_json(r.measured)},
                        {"reference", quantity_json(r.reference)},
                        {"abs_error", real_json(r.abs_error)},
                        {"rel_error", real_json(r.rel_error)},
                        {"error", r.error}});
    }
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"name", report.name},
            {"passed", report.passed},
            {"fitted_order", real_json(report.fitted_order)},
            {"checks", checks},
            {"rows", rows},
            {"table", to_json(report.table)}};
}

nlohmann::json to_json(const CatalogReport& report) {
    return {{"name", "ampere_catalog"}, {"passed", report.passed}, {"table", to_json(report.table)}};
}

std::filesystem::path json_sibling(const std::filesystem::path& path) {
    auto p = path;
    p.replace_extension(".json");
    if (p == path) p += ".json";
    return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace ampere
