#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwell/config.hpp"
#include "dwell/errors.hpp"
#include "dwell/experiments.hpp"

namespace dwell {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// 17 significant digits, enough to round-trip any double.
inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// UTC ISO-8601 timestamp. SOURCE_DATE_EPOCH, when set, pins it for reproducible files.
inline std::string iso8601_timestamp()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunMetadata {
    nlohmann::ordered_json config;
    std::string generated;
};

inline RunMetadata make_metadata(const ExperimentConfig& c) { return {config_to_json(c), iso8601_timestamp()}; }

/// `#` metadata lines, a header row, then data rows.
inline std::string render_csv(const Table& t, const RunMetadata& meta)
{
    std::ostringstream os;
    os << "# tool: dwell " << kToolVersion << '\n';
    os << "# panel: " << t.name << '\n';
    os << "# config: " << meta.config.dump() << '\n';
    os << "# generated: " << meta.generated << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_real(row[i]);
        os << '\n';
    }
    return os.str();
}

/// {"meta": {...}, "rows": [{column: value, ...}, ...]}.
inline std::string render_json(const Table& t, const RunMetadata& meta)
{
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", "dwell"},
                   {"version", kToolVersion},
                   {"panel", t.name},
                   {"config", meta.config},
                   {"generated", meta.generated},
                   {"columns", t.columns}};
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < r.size(); ++i) obj[t.columns[i]] = r[i];
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(1) + "\n";
}

/// The part of a rendered file that must be identical across reruns: the
/// header and data rows of a CSV, the "rows" array of a JSON document.
inline std::string data_section(const std::string& text, OutputFormat format)
{
    if (format == OutputFormat::Json) return nlohmann::ordered_json::parse(text).at("rows").dump();
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + '\n';
    return out;
}

/// One file per table under c.out; returns the written paths.
inline std::vector<std::filesystem::path> write_tables(const std::vector<Table>& tables, const ExperimentConfig& c,
                                                       const RunMetadata& meta)
{
    namespace fs = std::filesystem;
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (!fs::is_directory(dir)) throw IoError("output path " + dir.string() + " is not a directory");

    std::vector<fs::path> written;
    for (const auto& t : tables) {
        const fs::path file = dir / (t.name + (c.format == OutputFormat::Csv ? ".csv" : ".json"));
        const std::string body = c.format == OutputFormat::Csv ? render_csv(t, meta) : render_json(t, meta);
        std::ofstream os(file, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + file.string() + " for writing");
        os << body;
        os.flush();
        if (!os) throw IoError("write to " + file.string() + " failed");
        written.push_back(file);
    }
    return written;
}

}  // namespace dwell
