#pragma once

// Daily time series, summary statistics and CSV ingestion.
//
// Standard deviations use the population convention (divide by n)
// everywhere in the project: summary statistics, KGE coefficient of
// variation terms and the corruption harness moment targets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mwh/csv.hpp"
#include "mwh/error.hpp"

namespace mwh {

using Date = std::chrono::year_month_day;

inline constexpr Date kDefaultStartDate{std::chrono::year{2000}, std::chrono::January,
                                        std::chrono::day{1}};

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
inline std::optional<Date> parse_date(std::string_view text) {
    text = csv::trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = csv::to_int(text.substr(0, 4));
    auto m = csv::to_int(text.substr(5, 2));
    auto d = csv::to_int(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    Date date{std::chrono::year{static_cast<int>(*y)},
              std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline Date add_days(Date d, long n) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

/// An ordered daily series of finite values with a calendar anchor.
class Series {
public:
    Series(Date start, std::vector<double> values) : start_(start), values_(std::move(values)) {
        if (values_.size() < 2)
            throw DataError("series needs at least 2 values, got " +
                            std::to_string(values_.size()));
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw DataError("non-finite value at index " + std::to_string(i));
    }

    explicit Series(std::vector<double> values) : Series(kDefaultStartDate, std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    Date start_date() const noexcept { return start_; }
    Date date_at(std::size_t i) const { return add_days(start_, static_cast<long>(i)); }

    /// Sub-series [offset, offset + count).
    Series slice(std::size_t offset, std::size_t count) const {
        if (offset + count > values_.size()) throw DataError("slice out of range");
        return Series(date_at(offset),
                      std::vector<double>(values_.begin() + static_cast<long>(offset),
                                          values_.begin() + static_cast<long>(offset + count)));
    }

    Series tail(std::size_t offset) const { return slice(offset, size() - offset); }

    bool all_non_negative() const noexcept {
        for (double v : values_)
            if (v < 0.0) return false;
        return true;
    }

    friend bool operator==(const Series& a, const Series& b) {
        return a.start_ == b.start_ && a.values_ == b.values_;
    }

private:
    Date start_;
    std::vector<double> values_;
};

/// Precipitation and potential evapotranspiration on a shared daily axis.
class Forcing {
public:
    Forcing(Series precip, Series pet) : precip_(std::move(precip)), pet_(std::move(pet)) {
        if (precip_.size() != pet_.size())
            throw DataError("precip and pet lengths differ");
        if (precip_.start_date() != pet_.start_date())
            throw DataError("precip and pet start dates differ");
        if (!precip_.all_non_negative()) throw DataError("negative precipitation");
        if (!pet_.all_non_negative()) throw DataError("negative PET");
    }

    const Series& precip() const noexcept { return precip_; }
    const Series& pet() const noexcept { return pet_; }
    std::size_t size() const noexcept { return precip_.size(); }
    Date start_date() const noexcept { return precip_.start_date(); }

private:
    Series precip_;
    Series pet_;
};

struct SummaryStats {
    double mean = 0.0;
    double std = 0.0;  // population

    double cv() const {
        if (mean == 0.0) throw ComputeError("coefficient of variation undefined for zero mean");
        return std / mean;
    }
};

inline double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

inline SummaryStats summary_stats(std::span<const double> v) {
    if (v.size() < 2) throw DataError("summary statistics need at least 2 values");
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

inline SummaryStats summary_stats(const Series& s) { return summary_stats(s.values()); }

/// Pearson correlation with population covariance. Throws when either
/// input has zero spread.
inline double pearson_cc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("correlation of series with different lengths");
    if (a.size() < 2) throw DataError("correlation needs at least 2 values");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw ComputeError("correlation undefined: zero standard deviation");
    // sqrt(x*x) == x exactly in IEEE arithmetic, so identical inputs give exactly 1.
    const double cc = sab / std::sqrt(saa * sbb);
    return std::clamp(cc, -1.0, 1.0);
}

inline double pearson_cc(const Series& a, const Series& b) {
    return pearson_cc(a.values(), b.values());
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

/// Validates the `date` column: parseable and strictly consecutive days.
inline Date check_dates(const csv::Table& table) {
    const auto date_col = table.column("date");
    if (table.rows.empty()) throw DataError("no data rows");
    Date first{};
    Date prev{};
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto d = parse_date(table.rows[r][date_col]);
        if (!d)
            throw DataError("invalid date '" + table.rows[r][date_col] + "' at row " +
                            std::to_string(r + 1));
        if (r == 0) {
            first = *d;
        } else if (std::chrono::sys_days{*d} - std::chrono::sys_days{prev} != std::chrono::days{1}) {
            throw DataError("date gap between " + format_date(prev) + " and " + format_date(*d) +
                            " at row " + std::to_string(r + 1));
        }
        prev = *d;
    }
    return first;
}

inline std::vector<double> numeric_column(const csv::Table& table, std::string_view name,
                                          bool non_negative) {
    const auto col = table.column(name);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cell = table.rows[r][col];
        if (csv::trim(cell).empty())
            throw DataError("missing value in column '" + std::string(name) + "' at row " +
                            std::to_string(r + 1));
        auto v = csv::to_double(cell);
        if (!v)
            throw DataError("non-numeric cell at row " + std::to_string(r + 1) + " ('" + cell +
                            "')");
        if (non_negative && *v < 0.0)
            throw DataError("negative value in column '" + std::string(name) + "' at row " +
                            std::to_string(r + 1));
        out.push_back(*v);
    }
    return out;
}

}  // namespace detail

/// Loads one column of a daily CSV file with a `date` column.
inline Series load_series(const std::string& path, std::string_view column,
                          bool non_negative = true) {
    const auto table = csv::read(path);
    const Date start = detail::check_dates(table);
    return Series(start, detail::numeric_column(table, column, non_negative));
}

inline Forcing load_forcing(const std::string& path, std::string_view precip_column = "precip_mm",
                            std::string_view pet_column = "pet_mm") {
    const auto table = csv::read(path);
    const Date start = detail::check_dates(table);
    return Forcing(Series(start, detail::numeric_column(table, precip_column, true)),
                   Series(start, detail::numeric_column(table, pet_column, true)));
}

/// Writes `date,<column>` rows with round-trip precision.
inline void write_series(std::ostream& out, const Series& s, std::string_view column) {
    out << "date," << column << '\n';
    for (std::size_t i = 0; i < s.size(); ++i)
        out << format_date(s.date_at(i)) << ',' << csv::format_double(s[i]) << '\n';
}

}  // namespace mwh
