#pragma once

// Flux map: acceptable runs placed in the ternary space of their runoff
// mode fractions and classified by strict-majority dominance.
//
// Ternary embedding: slow -> (0, 0), wetness -> (1, 0),
// intensity -> (0.5, sqrt(3)/2).

#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwh/csv.hpp"
#include "mwh/error.hpp"
#include "mwh/experiment.hpp"
#include "mwh/metrics.hpp"
#include "mwh/models/types.hpp"

namespace mwh {

enum class DominanceClass { SlowDominated, WetnessDominated, IntensityDominated, NoDominantMode };

constexpr std::string_view to_string(DominanceClass c) noexcept {
    switch (c) {
        case DominanceClass::SlowDominated: return "slow_dominated";
        case DominanceClass::WetnessDominated: return "wetness_dominated";
        case DominanceClass::IntensityDominated: return "intensity_dominated";
        case DominanceClass::NoDominantMode: return "no_dominant_mode";
    }
    return "?";
}

inline std::optional<DominanceClass> parse_dominance(std::string_view s) {
    for (auto c : {DominanceClass::SlowDominated, DominanceClass::WetnessDominated,
                   DominanceClass::IntensityDominated, DominanceClass::NoDominantMode})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

namespace detail {
inline void require_valid(const FluxFractions& f) {
    if (!f.valid()) throw ComputeError("degenerate flux fractions (must be in [0,1] and sum to 1)");
}
}  // namespace detail

/// More than half of the runoff from one mode; otherwise no dominant mode.
inline DominanceClass classify(const FluxFractions& f) {
    detail::require_valid(f);
    if (f.slow > 0.5) return DominanceClass::SlowDominated;
    if (f.wetness > 0.5) return DominanceClass::WetnessDominated;
    if (f.intensity > 0.5) return DominanceClass::IntensityDominated;
    return DominanceClass::NoDominantMode;
}

inline const double kTriangleHeight = std::sqrt(3.0) / 2.0;

inline std::pair<double, double> ternary_coords(const FluxFractions& f) {
    detail::require_valid(f);
    return {f.wetness + 0.5 * f.intensity, kTriangleHeight * f.intensity};
}

struct FluxMapPoint {
    long long run_id = 0;
    FluxFractions fractions;
    double x = 0.0;
    double y = 0.0;
    double metric_value = 0.0;
    DominanceClass dominance = DominanceClass::NoDominantMode;
};

inline FluxMapPoint make_point(long long run_id, const FluxFractions& f, double metric_value) {
    const auto [x, y] = ternary_coords(f);
    return {run_id, f, x, y, metric_value, classify(f)};
}

/// Points for records that passed an acceptability filter.
inline std::vector<FluxMapPoint> fluxmap_points(std::span<const EvaluationRecord> accepted,
                                                MetricId metric) {
    std::vector<FluxMapPoint> points;
    points.reserve(accepted.size());
    for (const auto& r : accepted) {
        const auto v = r.value(metric);
        if (!r.fractions || !v) throw ComputeError("record without fractions or metric value");
        points.push_back(make_point(r.run_id, *r.fractions, *v));
    }
    return points;
}

struct FluxMapHeader {
    MetricId metric = MetricId::Kgess;
    double hmv = 0.0;
    double threshold = 0.0;
    std::size_t ensemble_size = 0;
    std::vector<std::string> extra;  // additional `key=value` comment lines
};

/// Writes the plot-ready CSV. Every point must lie in [threshold, hmv + 0.01].
inline void export_fluxmap(std::ostream& out, std::span<const FluxMapPoint> points,
                           const FluxMapHeader& header) {
    for (const auto& p : points)
        if (p.metric_value < header.threshold || p.metric_value > header.hmv + 0.01 + 1e-12)
            throw ComputeError("flux map point " + std::to_string(p.run_id) +
                               " outside [threshold, hmv + 0.01]");
    out << "# metric=" << to_string(header.metric) << '\n';
    out << "# hmv=" << csv::format_double(header.hmv) << '\n';
    out << "# threshold=" << csv::format_double(header.threshold) << '\n';
    out << "# ensemble_size=" << header.ensemble_size << '\n';
    for (const auto& e : header.extra) out << "# " << e << '\n';
    out << "run_id,f_intensity,f_wetness,f_slow,x,y,metric,class\n";
    for (const auto& p : points) {
        out << p.run_id << ',' << csv::format_double(p.fractions.intensity) << ','
            << csv::format_double(p.fractions.wetness) << ','
            << csv::format_double(p.fractions.slow) << ',' << csv::format_double(p.x) << ','
            << csv::format_double(p.y) << ',' << csv::format_double(p.metric_value) << ','
            << to_string(p.dominance) << '\n';
    }
}

inline void export_fluxmap(const std::string& path, std::span<const FluxMapPoint> points,
                           const FluxMapHeader& header) {
    auto out = csv::open_output(path);
    export_fluxmap(out, points, header);
    if (!out) throw DataError("failed writing '" + path + "'");
}

struct FluxMapFile {
    FluxMapHeader header;
    std::vector<FluxMapPoint> points;
};

inline FluxMapFile import_fluxmap(const std::string& path) {
    const auto table = csv::read(path);
    FluxMapFile file;
    for (const auto& c : table.comments) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) continue;
        const auto key = c.substr(0, eq);
        const auto val = c.substr(eq + 1);
        if (key == "metric") {
            auto m = parse_metric(val);
            if (!m) throw DataError("flux map: unknown metric '" + val + "'");
            file.header.metric = *m;
        } else if (key == "hmv") {
            file.header.hmv = csv::to_double(val).value_or(0.0);
        } else if (key == "threshold") {
            file.header.threshold = csv::to_double(val).value_or(0.0);
        } else if (key == "ensemble_size") {
            file.header.ensemble_size = static_cast<std::size_t>(csv::to_int(val).value_or(0));
        } else {
            file.header.extra.push_back(c);
        }
    }
    const std::array<std::string_view, 8> cols{"run_id", "f_intensity", "f_wetness", "f_slow",
                                               "x",      "y",           "metric",    "class"};
    if (table.header != std::vector<std::string>(cols.begin(), cols.end()))
        throw DataError("flux map: unexpected header");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        FluxMapPoint p;
        auto id = csv::to_int(row[0]);
        auto fi = csv::to_double(row[1]), fw = csv::to_double(row[2]), fs = csv::to_double(row[3]);
        auto x = csv::to_double(row[4]), y = csv::to_double(row[5]), v = csv::to_double(row[6]);
        auto cls = parse_dominance(row[7]);
        if (!id || !fi || !fw || !fs || !x || !y || !v || !cls)
            throw DataError("flux map: malformed row " + std::to_string(r + 1));
        p.run_id = *id;
        p.fractions = {*fi, *fw, *fs};
        p.x = *x;
        p.y = *y;
        p.metric_value = *v;
        p.dominance = *cls;
        file.points.push_back(p);
    }
    return file;
}

}  // namespace mwh
