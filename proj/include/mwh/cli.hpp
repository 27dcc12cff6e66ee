#pragma once

// Command implementations behind the `mwh` executable. Each command reads a
// RunConfig, writes its outputs under `out`, and returns the written paths.
// Every output file records the master seed in its header.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwh/config.hpp"
#include "mwh/corruption.hpp"
#include "mwh/csv.hpp"
#include "mwh/error.hpp"
#include "mwh/experiment.hpp"
#include "mwh/fluxmap.hpp"
#include "mwh/metrics.hpp"
#include "mwh/models/simulate.hpp"
#include "mwh/sampling/lhs.hpp"
#include "mwh/sampling/sce.hpp"
#include "mwh/series.hpp"

namespace mwh::cli {

using Json = nlohmann::ordered_json;

struct FilterSummary {
    MetricId metric;
    double delta;
    double hmv;
    double threshold;
    std::size_t accepted;
    std::string path;
};

struct CommandResult {
    std::vector<std::string> files;
    std::vector<SufficiencyVerdict> verdicts;
    std::vector<FilterSummary> filters;
    std::map<MetricId, SceRepeats> sce;
};

namespace detail {

inline std::filesystem::path prepare_out(const RunConfig& c) {
    std::filesystem::path dir(c.out.empty() ? "." : c.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

inline void require_input(const RunConfig& c) {
    if (c.input.empty()) throw ConfigError("an input file is required (input = ... or --input)");
    if (!std::filesystem::exists(c.input)) throw ConfigError("file not found: '" + c.input + "'");
}

inline void finish(std::ofstream& out, const std::filesystem::path& p) {
    out.flush();
    if (!out) throw DataError("failed writing '" + p.string() + "'");
}

inline void write_json(const std::filesystem::path& p, const Json& j) {
    auto out = csv::open_output(p.string());
    out << j.dump(2) << '\n';
    finish(out, p);
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json verdict_json(const SufficiencyVerdict& v) {
    Json j;
    j["metric"] = to_string(v.metric);
    j["ensemble_hmv"] = number_or_null(v.ensemble_hmv);
    j["sce_hmv"] = number_or_null(v.sce_hmv);
    j["hmv"] = number_or_null(v.hmv);
    j["sufficient"] = v.sufficient;
    j["inadequate_side"] = to_string(v.inadequate_side);
    return j;
}

inline Json sce_json(const RunConfig& c, const ParameterSpace& space, MetricId metric,
                     const SceRepeats& reps) {
    const auto sc = c.sce_config();
    Json j;
    j["metric"] = to_string(metric);
    j["model"] = to_string(c.model);
    j["seed"] = c.seed;
    j["repeats"] = reps.results.size();
    j["sce_hmv"] = number_or_null(reps.sce_hmv);
    j["config"] = {{"n_complexes", sc.n_complexes},
                   {"points_per_complex", sc.resolved_points_per_complex(space.size())},
                   {"subcomplex_size", sc.resolved_subcomplex_size(space.size())},
                   {"evolution_steps", sc.resolved_evolution_steps(space.size())},
                   {"max_evals", sc.max_evals},
                   {"convergence_tol", sc.convergence_tol},
                   {"convergence_window", sc.convergence_window}};
    Json runs = Json::array();
    for (std::size_t r = 0; r < reps.results.size(); ++r) {
        const auto& res = reps.results[r];
        Json run;
        run["seed"] = sc.seed + r;
        run["best_value"] = number_or_null(res.best_value);
        Json params = Json::object();
        for (std::size_t i = 0; i < res.best_params.size(); ++i)
            params[space[i].name] = res.best_params[i];
        run["best_params"] = params;
        run["evals_used"] = res.evals_used;
        run["failed_evals"] = res.failed_evals;
        Json trace = Json::array();
        for (double t : res.trace) trace.push_back(number_or_null(t));
        run["trace"] = trace;
        runs.push_back(run);
    }
    j["runs"] = runs;
    return j;
}

struct Inputs {
    Forcing forcing;
    Series obs_window;
};

inline Inputs load_inputs(const RunConfig& c) {
    require_input(c);
    auto forcing = load_forcing(c.input, c.precip_column, c.pet_column);
    auto obs = load_series(c.input, c.obs_column);
    auto window = align_observations(obs, forcing, c.warmup);
    return {std::move(forcing), std::move(window)};
}

inline Objective make_objective(const RunConfig& c, const Inputs& in, MetricId metric) {
    const auto opts = c.simulate_options();
    return [model = c.model, opts, metric, &in](std::span<const double> x) {
        const auto sim = simulate(model, x, in.forcing, opts);
        return evaluate(metric, in.obs_window, sim.flow);
    };
}

inline std::string delta_label(double d) { return csv::format_double(d); }

/// Flux maps and filter summaries for one metric and every delta.
inline void write_fluxmaps(const RunConfig& c, const std::filesystem::path& dir,
                           std::span<const EvaluationRecord> records, MetricId metric, double hmv,
                           CommandResult& result) {
    for (double delta : c.deltas) {
        const auto filter = AcceptabilityFilter::from_hmv(metric, hmv, delta);
        const auto accepted = acceptable_runs(records, filter);
        const auto points = fluxmap_points(accepted, metric);
        FluxMapHeader header{metric, hmv, filter.threshold, records.size(),
                             {"seed=" + std::to_string(c.seed), "delta=" + delta_label(delta),
                              "model=" + std::string(to_string(c.model))}};
        const auto path =
            dir / ("fluxmap_" + std::string(to_string(metric)) + "_" + delta_label(delta) + ".csv");
        export_fluxmap(path.string(), points, header);
        result.files.push_back(path.string());
        result.filters.push_back({metric, delta, hmv, filter.threshold, accepted.size(), path.string()});
    }
}

inline Json filters_json(std::span<const FilterSummary> filters) {
    Json arr = Json::array();
    for (const auto& f : filters) {
        arr.push_back({{"metric", to_string(f.metric)},
                       {"delta", f.delta},
                       {"hmv", f.hmv},
                       {"threshold", f.threshold},
                       {"accepted", f.accepted},
                       {"file", std::filesystem::path(f.path).filename().string()}});
    }
    return arr;
}

inline std::optional<double> sce_hmv_from_file(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) return std::nullopt;
    std::ifstream in(p);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse '" + p.string() + "': " + e.what());
    }
    if (!j.contains("sce_hmv") || !j["sce_hmv"].is_number())
        throw DataError("'" + p.string() + "' has no numeric sce_hmv");
    return j["sce_hmv"].get<double>();
}

/// SCE HMV from the config, else from sce_<metric>.json next to the ensemble
/// file or in the output directory.
inline std::optional<double> lookup_sce_hmv(const RunConfig& c, MetricId m) {
    if (auto it = c.sce_hmv.find(m); it != c.sce_hmv.end()) return it->second;
    const std::string name = "sce_" + std::string(to_string(m)) + ".json";
    std::vector<std::filesystem::path> candidates;
    if (!c.ensemble.empty()) candidates.push_back(std::filesystem::path(c.ensemble).parent_path() / name);
    candidates.push_back(std::filesystem::path(c.out.empty() ? "." : c.out) / name);
    for (const auto& p : candidates)
        if (auto v = sce_hmv_from_file(p)) return v;
    return std::nullopt;
}

}  // namespace detail

/// Metric sensitivity: degradation curves, residuals and the step-20 table.
inline CommandResult cmd_sensitivity(const RunConfig& c) {
    detail::require_input(c);
    const auto obs = load_series(c.input, c.obs_column, false);
    const auto dir = detail::prepare_out(c);
    CommandResult result;

    const auto curves = degradation_table(obs, c.seed);
    {
        const auto p = dir / "degradation.csv";
        auto out = csv::open_output(p.string());
        out << "# seed=" << c.seed << '\n' << "metric,regime,step,value\n";
        for (const auto& curve : curves)
            for (int k = 0; k <= kCorruptionSteps; ++k)
                out << to_string(curve.metric) << ',' << to_string(curve.regime) << ',' << k << ','
                    << csv::format_double(curve.values[static_cast<std::size_t>(k)]) << '\n';
        detail::finish(out, p);
        result.files.push_back(p.string());
    }
    {
        const auto p = dir / "residuals.csv";
        auto out = csv::open_output(p.string());
        out << "# seed=" << c.seed << '\n' << "regime,step,index,obs,residual\n";
        for (const auto& [key, resid] : residual_table(obs, c.seed))
            for (std::size_t i = 0; i < resid.size(); ++i)
                out << to_string(key.first) << ',' << key.second << ',' << i << ','
                    << csv::format_double(obs[i]) << ',' << csv::format_double(resid[i]) << '\n';
        detail::finish(out, p);
        result.files.push_back(p.string());
    }
    {
        const auto p = dir / "step20.csv";
        auto out = csv::open_output(p.string());
        out << "# seed=" << c.seed << '\n' << "regime,nse,kgess,wia\n";
        for (auto r : kAllRegimes) {
            out << to_string(r);
            for (auto m : kAllMetrics)
                for (const auto& curve : curves)
                    if (curve.metric == m && curve.regime == r)
                        out << ',' << csv::format_double(curve.values[kCorruptionSteps]);
            out << '\n';
        }
        detail::finish(out, p);
        result.files.push_back(p.string());
    }
    return result;
}

/// One simulation with the parameter set given as param.<name> settings.
inline CommandResult cmd_simulate(const RunConfig& c) {
    detail::require_input(c);
    const auto values = c.parameter_values();
    const auto forcing = load_forcing(c.input, c.precip_column, c.pet_column);
    auto opts = c.simulate_options();
    opts.keep_trace = true;
    const auto sim = simulate(c.model, values, forcing, opts);
    const auto dir = detail::prepare_out(c);

    const auto p = dir / "simulation.csv";
    auto out = csv::open_output(p.string());
    out << "# seed=" << c.seed << '\n'
        << "# model=" << to_string(c.model) << '\n'
        << "# warmup=" << c.warmup << '\n';
    const auto space = default_space(c.model);
    for (std::size_t i = 0; i < values.size(); ++i)
        out << "# param." << space[i].name << '=' << csv::format_double(values[i]) << '\n';
    out << "date,precip_mm,pet_mm,flow_mm,intensity_mm,wetness_mm,slow_mm,aet_mm,deep_loss_mm";
    for (const auto& s : sim.store_names) out << ',' << s;
    out << '\n';
    const auto w = static_cast<std::size_t>(c.warmup);
    for (std::size_t i = 0; i < sim.flow.size(); ++i) {
        const auto& f = sim.fluxes[i];
        out << format_date(sim.flow.date_at(i)) << ','
            << csv::format_double(forcing.precip()[w + i]) << ','
            << csv::format_double(forcing.pet()[w + i]) << ',' << csv::format_double(f.total)
            << ',' << csv::format_double(f.intensity) << ',' << csv::format_double(f.wetness)
            << ',' << csv::format_double(f.slow) << ',' << csv::format_double(f.aet) << ','
            << csv::format_double(f.deep_loss);
        for (double s : sim.state_trace[i]) out << ',' << csv::format_double(s);
        out << '\n';
    }
    const auto& b = sim.balance;
    out << "# mass_balance precip=" << csv::format_double(b.precip)
        << " aet=" << csv::format_double(b.aet) << " flow=" << csv::format_double(b.flow)
        << " deep_loss=" << csv::format_double(b.deep_loss)
        << " storage_change=" << csv::format_double(b.storage_change)
        << " residual=" << csv::format_double(b.residual()) << '\n';
    detail::finish(out, p);
    return {{p.string()}, {}, {}, {}};
}

/// SCE repeats for every configured metric.
inline CommandResult cmd_calibrate(const RunConfig& c) {
    c.validate();
    const auto in = detail::load_inputs(c);
    const auto space = c.space();
    const auto dir = detail::prepare_out(c);
    CommandResult result;
    for (auto m : c.metrics) {
        auto reps = sce_repeats(detail::make_objective(c, in, m), space, c.sce_config(), c.repeats,
                                c.threads);
        const auto p = dir / ("sce_" + std::string(to_string(m)) + ".json");
        detail::write_json(p, detail::sce_json(c, space, m, reps));
        result.files.push_back(p.string());
        result.sce.emplace(m, std::move(reps));
    }
    return result;
}

/// Full experiment: LHS ensemble, SCE repeats, sufficiency verdicts and flux
/// maps for every (metric, delta).
inline CommandResult cmd_ensemble(const RunConfig& c) {
    c.validate();
    const auto in = detail::load_inputs(c);
    const auto space = c.space();
    const auto dir = detail::prepare_out(c);
    CommandResult result;

    std::vector<ParameterSet> sets;
    std::vector<long long> ids;
    if (!c.sets.empty()) {
        auto loaded = read_parameter_sets(c.sets, space);
        sets = std::move(loaded.sets);
        ids = std::move(loaded.run_ids);
        if (sets.empty()) throw DataError("parameter set file '" + c.sets + "' is empty");
    } else {
        sets = lhs(space, c.size, c.seed);
        const auto p = dir / "parameter_sets.csv";
        auto out = csv::open_output(p.string());
        out << "# seed=" << c.seed << '\n' << "# model=" << to_string(c.model) << '\n';
        write_parameter_sets(out, space, sets, 0);
        detail::finish(out, p);
        result.files.push_back(p.string());
    }

    EnsembleSpec spec;
    spec.model = c.model;
    spec.metrics = c.metrics;
    spec.sim = c.simulate_options();
    spec.threads = c.threads;

    std::vector<EvaluationRecord> records;
    records.reserve(sets.size());
    {
        const auto p = dir / "ensemble.csv";
        auto out = csv::open_output(p.string());
        out << "# seed=" << c.seed << '\n'
            << "# model=" << to_string(c.model) << '\n'
            << "# warmup=" << c.warmup << '\n'
            << "# size=" << sets.size() << '\n';
        write_ensemble_header(out, space);
        std::size_t done = 0;
        stream_ensemble(sets, in.forcing, in.obs_window, spec, c.batch_size,
                        [&](std::vector<EvaluationRecord>& batch) {
                            for (auto& r : batch) {
                                if (!ids.empty()) r.run_id = ids[done];
                                ++done;
                            }
                            write_ensemble_rows(out, batch);
                            for (auto& r : batch) {
                                r.params = {};
                                r.error = {};
                                records.push_back(std::move(r));
                            }
                        });
        detail::finish(out, p);
        result.files.push_back(p.string());
    }

    Json verdicts = Json::array();
    for (auto m : c.metrics) {
        auto reps = sce_repeats(detail::make_objective(c, in, m), space, c.sce_config(), c.repeats,
                                c.threads);
        const auto sp = dir / ("sce_" + std::string(to_string(m)) + ".json");
        detail::write_json(sp, detail::sce_json(c, space, m, reps));
        result.files.push_back(sp.string());

        const auto v = sufficiency(records, reps.sce_hmv, m);
        result.verdicts.push_back(v);
        verdicts.push_back(detail::verdict_json(v));
        detail::write_fluxmaps(c, dir, records, m, v.hmv, result);
        result.sce.emplace(m, std::move(reps));
    }

    Json summary;
    summary["seed"] = c.seed;
    summary["model"] = to_string(c.model);
    summary["ensemble_size"] = records.size();
    summary["verdicts"] = verdicts;
    summary["filters"] = detail::filters_json(result.filters);
    const auto vp = dir / "verdicts.json";
    detail::write_json(vp, summary);
    result.files.push_back(vp.string());
    return result;
}

namespace detail {
inline EnsembleFile load_ensemble_for(const RunConfig& c) {
    if (c.ensemble.empty()) throw ConfigError("an ensemble file is required (ensemble = ...)");
    if (!std::filesystem::exists(c.ensemble))
        throw ConfigError("file not found: '" + c.ensemble + "'");
    return read_ensemble(c.ensemble);
}
}  // namespace detail

/// Re-filters an existing ensemble file. The HMV is the ensemble best, raised
/// to the SCE best when one is available.
inline CommandResult cmd_fluxmap(const RunConfig& c) {
    c.validate();
    const auto file = detail::load_ensemble_for(c);
    const auto dir = detail::prepare_out(c);
    CommandResult result;
    for (auto m : c.metrics) {
        auto best = ensemble_hmv(file.records, m);
        if (!best)
            throw ComputeError("no record has a " + std::string(to_string(m)) + " value");
        double hmv = *best;
        if (auto s = detail::lookup_sce_hmv(c, m)) hmv = std::max(hmv, *s);
        detail::write_fluxmaps(c, dir, file.records, m, hmv, result);
    }
    Json summary;
    summary["seed"] = c.seed;
    summary["ensemble"] = c.ensemble;
    summary["filters"] = detail::filters_json(result.filters);
    const auto p = dir / "filters.json";
    detail::write_json(p, summary);
    result.files.push_back(p.string());
    return result;
}

/// Recomputes sufficiency verdicts from an ensemble file and SCE results.
inline CommandResult cmd_sufficiency(const RunConfig& c) {
    c.validate();
    const auto file = detail::load_ensemble_for(c);
    const auto dir = detail::prepare_out(c);
    CommandResult result;
    Json verdicts = Json::array();
    for (auto m : c.metrics) {
        auto s = detail::lookup_sce_hmv(c, m);
        if (!s)
            throw ConfigError("no SCE result for " + std::string(to_string(m)) +
                              " (set sce_hmv." + std::string(to_string(m)) + " or provide sce_" +
                              std::string(to_string(m)) + ".json)");
        const auto v = sufficiency(file.records, *s, m);
        result.verdicts.push_back(v);
        verdicts.push_back(detail::verdict_json(v));
    }
    Json summary;
    summary["seed"] = c.seed;
    summary["ensemble"] = c.ensemble;
    summary["verdicts"] = verdicts;
    const auto p = dir / "verdicts.json";
    detail::write_json(p, summary);
    result.files.push_back(p.string());
    return result;
}

}  // namespace mwh::cli
