#pragma once

// Minimal CSV reading/writing used by every file format in the project:
// comma separated, one header row, optional leading `#` comment lines.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mwh/error.hpp"

namespace mwh::csv {

struct Table {
    std::vector<std::string> comments;  // text after the leading '#', in order
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or nullopt.
    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::size_t column(std::string_view name) const {
        if (auto idx = find(name)) return *idx;
        throw DataError("missing column '" + std::string(name) + "'");
    }
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                     : pos - start);
        out.emplace_back(trim(cell));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Table parse(std::istream& in) {
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (view.empty()) continue;
        if (!have_header && view.front() == '#') {
            view.remove_prefix(1);
            t.comments.emplace_back(trim(view));
            continue;
        }
        if (!have_header) {
            t.header = split(view);
            have_header = true;
            continue;
        }
        if (view.front() == '#') {
            view.remove_prefix(1);
            t.comments.emplace_back(trim(view));
            continue;
        }
        auto cells = split(view);
        if (cells.size() != t.header.size())
            throw DataError("row " + std::to_string(t.rows.size() + 1) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw DataError("CSV has no header row");
    return t;
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    return parse(in);
}

/// Strict double parse: the whole cell must be a finite number.
inline std::optional<double> to_double(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::optional<long long> to_int(std::string_view cell) {
    cell = trim(cell);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty())
        return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file '" + path + "'");
    return out;
}

}  // namespace mwh::csv
