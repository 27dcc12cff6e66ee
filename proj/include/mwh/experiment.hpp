#pragma once

// Ensemble evaluation, sampling-sufficiency verdicts and acceptability
// filtering.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mwh/csv.hpp"
#include "mwh/error.hpp"
#include "mwh/metrics.hpp"
#include "mwh/models/simulate.hpp"
#include "mwh/parallel.hpp"
#include "mwh/sampling/parameter_space.hpp"
#include "mwh/sampling/sce.hpp"
#include "mwh/series.hpp"

namespace mwh {

/// Record flags, serialized as `|`-joined tokens ("ok" when none).
enum RecordFlag : unsigned {
    kFlagDegenerate = 1u << 0,     // zero total simulated volume
    kFlagSimFailed = 1u << 1,      // simulation raised an error
    kFlagNseFailed = 1u << 2,
    kFlagKgessFailed = 1u << 3,
    kFlagWiaFailed = 1u << 4,
};

constexpr unsigned metric_failure_flag(MetricId m) noexcept {
    return kFlagNseFailed << static_cast<unsigned>(index_of(m));
}

struct EvaluationRecord {
    long long run_id = 0;
    ParameterSet params;
    std::array<std::optional<double>, 3> metric_values;  // indexed by MetricId
    std::optional<FluxFractions> fractions;
    unsigned flags = 0;
    std::string error;  // first error message, if any

    std::optional<double> value(MetricId m) const { return metric_values[index_of(m)]; }
    bool degenerate() const noexcept { return (flags & kFlagDegenerate) != 0; }
};

inline std::string flags_to_string(unsigned flags) {
    if (flags == 0) return "ok";
    std::string out;
    auto add = [&](const char* tok) {
        if (!out.empty()) out += '|';
        out += tok;
    };
    if (flags & kFlagDegenerate) add("degenerate");
    if (flags & kFlagSimFailed) add("sim_failed");
    if (flags & kFlagNseFailed) add("nse_undefined");
    if (flags & kFlagKgessFailed) add("kgess_undefined");
    if (flags & kFlagWiaFailed) add("wia_undefined");
    return out;
}

inline unsigned flags_from_string(std::string_view text) {
    unsigned flags = 0;
    for (const auto& tok : csv::split(text, '|')) {
        if (tok == "ok" || tok.empty()) continue;
        if (tok == "degenerate") flags |= kFlagDegenerate;
        else if (tok == "sim_failed") flags |= kFlagSimFailed;
        else if (tok == "nse_undefined") flags |= kFlagNseFailed;
        else if (tok == "kgess_undefined") flags |= kFlagKgessFailed;
        else if (tok == "wia_undefined") flags |= kFlagWiaFailed;
        else throw DataError("unknown record flag '" + tok + "'");
    }
    return flags;
}

/// Observations restricted to the evaluation window: accepts a series
/// covering the full forcing period or exactly the post-warm-up window.
inline Series align_observations(const Series& obs, const Forcing& forcing, int warmup_days) {
    const auto warmup = static_cast<std::size_t>(std::max(warmup_days, 0));
    if (obs.size() == forcing.size()) {
        if (obs.start_date() != forcing.start_date())
            throw DataError("observed flow and forcing start on different dates");
        if (obs.size() < warmup + 2) throw ConfigError("observations shorter than the warm-up");
        return obs.tail(warmup);
    }
    if (obs.size() + warmup == forcing.size()) return obs;
    throw DataError("observed flow length " + std::to_string(obs.size()) +
                    " does not match forcing length " + std::to_string(forcing.size()) +
                    " (warm-up " + std::to_string(warmup) + ")");
}

struct EnsembleSpec {
    ModelId model = ModelId::Simhyd;
    std::vector<MetricId> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    SimulateOptions sim;
    unsigned threads = 1;
};

/// Evaluates one parameter set; never throws for model or metric failures.
inline EvaluationRecord evaluate_parameter_set(long long run_id, const ParameterSet& params,
                                               const Forcing& forcing, const Series& obs_window,
                                               const EnsembleSpec& spec) {
    EvaluationRecord rec;
    rec.run_id = run_id;
    rec.params = params;
    std::optional<SimulationOutput> sim;
    try {
        sim = simulate(spec.model, params, forcing, spec.sim);
    } catch (const Error& e) {
        rec.flags |= kFlagSimFailed;
        rec.error = e.what();
        for (auto m : spec.metrics) rec.flags |= metric_failure_flag(m);
        return rec;
    }
    if (sim->flow.size() != obs_window.size())
        throw DataError("observation window does not match simulation window");
    rec.fractions = sim->fractions;
    if (!rec.fractions) rec.flags |= kFlagDegenerate;
    for (auto m : spec.metrics) {
        try {
            rec.metric_values[index_of(m)] = evaluate(m, obs_window, sim->flow);
        } catch (const Error& e) {
            rec.flags |= metric_failure_flag(m);
            if (rec.error.empty()) rec.error = e.what();
        }
    }
    return rec;
}

/// One record per parameter set, in input order, independent of the number
/// of worker threads. `obs` may cover the full forcing period or only the
/// post-warm-up window. Run ids are first_id + index.
inline std::vector<EvaluationRecord> run_ensemble(std::span<const ParameterSet> sets,
                                                  const Forcing& forcing, const Series& obs,
                                                  const EnsembleSpec& spec,
                                                  long long first_id = 0) {
    std::vector<EvaluationRecord> records(sets.size());
    if (sets.empty()) return records;
    const Series window = align_observations(obs, forcing, spec.sim.warmup_days);
    parallel_for(sets.size(), spec.threads, [&](std::size_t i) {
        records[i] = evaluate_parameter_set(first_id + static_cast<long long>(i), sets[i], forcing,
                                            window, spec);
    });
    return records;
}

/// Runs the ensemble in batches of `batch_size`, handing each completed
/// batch (in order) to `sink`. Memory stays bounded by one batch.
inline void stream_ensemble(std::span<const ParameterSet> sets, const Forcing& forcing,
                            const Series& obs, const EnsembleSpec& spec, std::size_t batch_size,
                            const std::function<void(std::vector<EvaluationRecord>&)>& sink,
                            long long first_id = 0) {
    if (batch_size == 0) throw ConfigError("batch size must be >= 1");
    for (std::size_t start = 0; start < sets.size(); start += batch_size) {
        const std::size_t count = std::min(batch_size, sets.size() - start);
        auto batch = run_ensemble(sets.subspan(start, count), forcing, obs, spec,
                                  first_id + static_cast<long long>(start));
        sink(batch);
    }
}

// ---------------------------------------------------------------------------
// Sufficiency

enum class InadequateSide { Ensemble, Sce, Neither };

constexpr std::string_view to_string(InadequateSide s) noexcept {
    switch (s) {
        case InadequateSide::Ensemble: return "ensemble";
        case InadequateSide::Sce: return "sce";
        case InadequateSide::Neither: return "neither";
    }
    return "?";
}

inline constexpr double kSufficiencyTolerance = 0.01;

struct SufficiencyVerdict {
    MetricId metric = MetricId::Kgess;
    double ensemble_hmv = 0.0;
    double sce_hmv = 0.0;
    double hmv = 0.0;
    bool sufficient = false;
    InadequateSide inadequate_side = InadequateSide::Neither;
};

/// Compares the best ensemble value with the guided-search best. The 0.01
/// boundary counts as sufficient; the comparison allows for the rounding
/// of decimal inputs (0.81 - 0.80 is 0.010000000000000009 in binary).
inline SufficiencyVerdict sufficiency_verdict(MetricId metric, double ensemble_hmv,
                                              double sce_hmv) {
    SufficiencyVerdict v;
    v.metric = metric;
    v.ensemble_hmv = ensemble_hmv;
    v.sce_hmv = sce_hmv;
    v.hmv = std::max(ensemble_hmv, sce_hmv);
    const double diff = std::abs(ensemble_hmv - sce_hmv);
    v.sufficient = diff <= kSufficiencyTolerance + 1e-12;
    if (!v.sufficient)
        v.inadequate_side = ensemble_hmv < sce_hmv ? InadequateSide::Ensemble : InadequateSide::Sce;
    return v;
}

/// Highest metric value over records that carry one.
inline std::optional<double> ensemble_hmv(std::span<const EvaluationRecord> records,
                                          MetricId metric) {
    std::optional<double> best;
    for (const auto& r : records)
        if (auto v = r.value(metric); v && (!best || *v > *best)) best = *v;
    return best;
}

inline SufficiencyVerdict sufficiency(std::span<const EvaluationRecord> records, double sce_hmv,
                                      MetricId metric) {
    if (records.empty()) throw DataError("sufficiency needs a non-empty ensemble");
    const auto best = ensemble_hmv(records, metric);
    if (!best)
        throw ComputeError("no record in the ensemble has a " + std::string(to_string(metric)) +
                           " value");
    return sufficiency_verdict(metric, *best, sce_hmv);
}

// ---------------------------------------------------------------------------
// Acceptability

struct AcceptabilityFilter {
    MetricId metric = MetricId::Kgess;
    double delta = 0.1;
    double hmv = 1.0;
    double threshold = 0.9;  // hmv - delta

    static AcceptabilityFilter from_hmv(MetricId metric, double hmv, double delta) {
        if (!(delta > 0.0)) throw ConfigError("acceptability delta must be > 0");
        if (!std::isfinite(hmv)) throw ComputeError("HMV must be finite");
        return {metric, delta, hmv, hmv - delta};
    }
};

/// Records at or above the threshold, excluding degenerate runs, in input
/// order.
inline std::vector<EvaluationRecord> acceptable_runs(std::span<const EvaluationRecord> records,
                                                     const AcceptabilityFilter& filter) {
    std::vector<EvaluationRecord> out;
    for (const auto& r : records) {
        if (r.degenerate() || !r.fractions) continue;
        const auto v = r.value(filter.metric);
        if (v && *v >= filter.threshold) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ensemble file: run_id,<params...>,nse,kgess,wia,f_intensity,f_wetness,f_slow,flags

inline void write_ensemble_header(std::ostream& out, const ParameterSpace& space) {
    out << "run_id";
    for (const auto& d : space.dims()) out << ',' << d.name;
    out << ",nse,kgess,wia,f_intensity,f_wetness,f_slow,flags\n";
}

inline void write_ensemble_rows(std::ostream& out, std::span<const EvaluationRecord> records) {
    auto opt = [](const std::optional<double>& v) {
        return v ? csv::format_double(*v) : std::string();
    };
    for (const auto& r : records) {
        out << r.run_id;
        for (double p : r.params) out << ',' << csv::format_double(p);
        for (auto m : kAllMetrics) out << ',' << opt(r.value(m));
        if (r.fractions)
            out << ',' << csv::format_double(r.fractions->intensity) << ','
                << csv::format_double(r.fractions->wetness) << ','
                << csv::format_double(r.fractions->slow);
        else
            out << ",,,";
        out << ',' << flags_to_string(r.flags) << '\n';
    }
}

struct EnsembleFile {
    std::vector<std::string> comments;
    std::vector<std::string> param_names;
    std::vector<EvaluationRecord> records;
};

inline EnsembleFile read_ensemble(const std::string& path) {
    const auto table = csv::read(path);
    EnsembleFile file;
    file.comments = table.comments;
    const auto id_col = table.column("run_id");
    const auto nse_col = table.column("nse");
    if (nse_col < 1) throw DataError("ensemble file: unexpected column order");
    for (std::size_t c = id_col + 1; c < nse_col; ++c) file.param_names.push_back(table.header[c]);
    const std::array<std::size_t, 3> metric_cols{nse_col, table.column("kgess"), table.column("wia")};
    const auto fi = table.column("f_intensity");
    const auto fw = table.column("f_wetness");
    const auto fs = table.column("f_slow");
    const auto fl = table.column("flags");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        EvaluationRecord rec;
        auto id = csv::to_int(row[id_col]);
        if (!id) throw DataError("ensemble file: invalid run_id at row " + std::to_string(r + 1));
        rec.run_id = *id;
        for (std::size_t c = id_col + 1; c < nse_col; ++c) {
            auto v = csv::to_double(row[c]);
            if (!v) throw DataError("ensemble file: non-numeric parameter at row " + std::to_string(r + 1));
            rec.params.push_back(*v);
        }
        for (std::size_t m = 0; m < 3; ++m) {
            const auto& cell = row[metric_cols[m]];
            if (cell.empty()) continue;
            auto v = csv::to_double(cell);
            if (!v) throw DataError("ensemble file: non-numeric metric at row " + std::to_string(r + 1));
            rec.metric_values[m] = *v;
        }
        if (!row[fi].empty()) {
            auto a = csv::to_double(row[fi]), b = csv::to_double(row[fw]), c = csv::to_double(row[fs]);
            if (!a || !b || !c)
                throw DataError("ensemble file: invalid fractions at row " + std::to_string(r + 1));
            rec.fractions = FluxFractions{*a, *b, *c};
        }
        rec.flags = flags_from_string(row[fl]);
        file.records.push_back(std::move(rec));
    }
    return file;
}

}  // namespace mwh
