#pragma once

// Run configuration: a `key = value` text file (one key per line, `#`
// starts a comment) plus command-line overrides.
//
//   model = simhyd                  input = catchment.csv
//   obs_column = flow_mm            precip_column = precip_mm
//   pet_column = pet_mm             metrics = nse,kgess,wia
//   size = 1000000                  seed = 1
//   warmup = 365                    deltas = 0.05,0.1
//   threads = 1                     out = results
//   batch_size = 10000              repeats = 10
//   sets = parameter_sets.csv       ensemble = results/ensemble.csv
//   sce.n_complexes = 4             sce.max_evals = 50000
//   sce.convergence_tol = 1e-4      sce.convergence_window = 10
//   sce.points_per_complex, sce.subcomplex_size, sce.evolution_steps
//   range.<param> = lo,hi           param.<param> = value
//   init.<store> = value            sce_hmv.<metric> = value

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwh/csv.hpp"
#include "mwh/error.hpp"
#include "mwh/metrics.hpp"
#include "mwh/models/simulate.hpp"
#include "mwh/models/types.hpp"
#include "mwh/sampling/parameter_space.hpp"
#include "mwh/sampling/sce.hpp"

namespace mwh {

inline constexpr std::size_t kDefaultEnsembleSize = 1'000'000;

struct RunConfig {
    ModelId model = ModelId::Simhyd;
    std::string input;
    std::string obs_column = "flow_mm";
    std::string precip_column = "precip_mm";
    std::string pet_column = "pet_mm";
    std::vector<MetricId> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::size_t size = kDefaultEnsembleSize;
    std::uint64_t seed = 1;
    int warmup = kDefaultWarmupDays;
    std::vector<double> deltas{0.05, 0.1};
    unsigned threads = 1;
    std::string out = ".";
    std::size_t batch_size = 10'000;
    int repeats = 10;
    std::string sets;
    std::string ensemble;
    SceConfig sce;
    bool sce_complexes_set = false;  // otherwise chosen per model
    std::vector<std::pair<std::string, std::pair<double, double>>> ranges;
    std::map<std::string, double> params;
    std::map<std::string, double> init;
    std::map<MetricId, double> sce_hmv;

    /// SCE configuration with the per-model default complex count.
    SceConfig sce_config() const {
        SceConfig c = sce;
        if (!sce_complexes_set) c.n_complexes = model == ModelId::Sacramento ? 6 : 4;
        c.seed = seed;
        return c;
    }

    ParameterSpace space() const {
        auto s = default_space(model);
        for (const auto& [name, b] : ranges) {
            if (!s.find(name))
                throw ConfigError("range for unknown parameter '" + name + "' of " +
                                  std::string(to_string(model)));
            s = s.with_bounds(name, b.first, b.second);
        }
        return s;
    }

    /// Parameter values in canonical order; every parameter must be given.
    ParameterSet parameter_values() const {
        const auto s = default_space(model);
        for (const auto& [name, v] : params)
            if (!s.find(name)) throw ConfigError("unknown parameter '" + name + "'");
        ParameterSet out;
        std::string missing;
        for (const auto& d : s.dims()) {
            auto it = params.find(d.name);
            if (it == params.end()) {
                missing += (missing.empty() ? "" : ", ") + d.name;
                continue;
            }
            out.push_back(it->second);
        }
        if (!missing.empty()) throw ConfigError("missing parameter values: " + missing);
        return out;
    }

    std::optional<ModelState> initial_state() const {
        if (init.empty()) return std::nullopt;
        const auto names = store_names(model);
        for (const auto& [name, v] : init) {
            bool known = false;
            for (const auto& n : names) known = known || n == name;
            if (!known) throw ConfigError("unknown store '" + name + "'");
        }
        return make_initial_state(model, [&](std::string_view n) {
            auto it = init.find(std::string(n));
            return it == init.end() ? 0.0 : it->second;
        });
    }

    SimulateOptions simulate_options() const {
        SimulateOptions o;
        o.warmup_days = warmup;
        o.initial_state = initial_state();
        return o;
    }

    void validate() const {
        if (size < 1) throw ConfigError("size must be >= 1");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (threads < 1) throw ConfigError("threads must be >= 1");
        if (repeats < 1) throw ConfigError("repeats must be >= 1");
        if (warmup < 0) throw ConfigError("warmup must be >= 0");
        if (metrics.empty()) throw ConfigError("at least one metric is required");
        for (double d : deltas)
            if (!(d > 0.0)) throw ConfigError("deltas must be > 0");
        for (const auto* path : {&input, &sets, &ensemble})
            if (!path->empty() && !std::filesystem::exists(*path))
                throw ConfigError("file not found: '" + *path + "'");
    }
};

namespace detail {

inline double config_double(std::string_view key, std::string_view v) {
    auto d = csv::to_double(v);
    if (!d) throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    return *d;
}

inline long long config_int(std::string_view key, std::string_view v) {
    auto i = csv::to_int(v);
    if (!i) throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    return *i;
}

inline long long config_positive(std::string_view key, std::string_view v) {
    const auto i = config_int(key, v);
    if (i < 1) throw ConfigError("'" + std::string(key) + "' must be >= 1");
    return i;
}

}  // namespace detail

inline std::vector<MetricId> parse_metric_list(std::string_view text) {
    std::vector<MetricId> out;
    for (const auto& tok : csv::split(text, ',')) {
        const auto t = csv::trim(tok);
        if (t.empty()) continue;
        auto m = parse_metric(t);
        if (!m) throw ConfigError("unknown metric '" + std::string(t) + "' (nse, kgess, wia)");
        bool dup = false;
        for (auto x : out) dup = dup || x == *m;
        if (!dup) out.push_back(*m);
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    for (const auto& tok : csv::split(text, ',')) {
        const auto t = csv::trim(tok);
        if (!t.empty()) out.push_back(detail::config_double(key, t));
    }
    return out;
}

/// Applies one `key = value` setting.
inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    const std::string k(csv::trim(key));
    const std::string v(csv::trim(value));
    auto suffix = [&](std::string_view prefix) -> std::optional<std::string> {
        if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0)
            return k.substr(prefix.size());
        return std::nullopt;
    };
    if (k == "model") {
        auto m = parse_model(v);
        if (!m) throw ConfigError("unknown model '" + v + "' (simhyd, sacramento)");
        c.model = *m;
    } else if (k == "input") {
        c.input = v;
    } else if (k == "obs_column") {
        c.obs_column = v;
    } else if (k == "precip_column") {
        c.precip_column = v;
    } else if (k == "pet_column") {
        c.pet_column = v;
    } else if (k == "metrics" || k == "metric") {
        c.metrics = parse_metric_list(v);
    } else if (k == "size") {
        c.size = static_cast<std::size_t>(detail::config_positive(k, v));
    } else if (k == "seed") {
        const auto s = detail::config_int(k, v);
        if (s < 0) throw ConfigError("seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "warmup") {
        const auto w = detail::config_int(k, v);
        if (w < 0) throw ConfigError("warmup must be >= 0");
        c.warmup = static_cast<int>(w);
    } else if (k == "deltas" || k == "delta") {
        c.deltas = parse_double_list(k, v);
    } else if (k == "threads") {
        c.threads = static_cast<unsigned>(detail::config_positive(k, v));
    } else if (k == "out") {
        c.out = v;
    } else if (k == "batch_size") {
        c.batch_size = static_cast<std::size_t>(detail::config_positive(k, v));
    } else if (k == "repeats") {
        c.repeats = static_cast<int>(detail::config_positive(k, v));
    } else if (k == "sets") {
        c.sets = v;
    } else if (k == "ensemble") {
        c.ensemble = v;
    } else if (k == "sce.n_complexes") {
        c.sce.n_complexes = static_cast<int>(detail::config_int(k, v));
        c.sce_complexes_set = true;
    } else if (k == "sce.points_per_complex") {
        c.sce.points_per_complex = static_cast<int>(detail::config_int(k, v));
    } else if (k == "sce.subcomplex_size") {
        c.sce.subcomplex_size = static_cast<int>(detail::config_int(k, v));
    } else if (k == "sce.evolution_steps") {
        c.sce.evolution_steps = static_cast<int>(detail::config_int(k, v));
    } else if (k == "sce.max_evals") {
        c.sce.max_evals = detail::config_int(k, v);
    } else if (k == "sce.convergence_tol") {
        c.sce.convergence_tol = detail::config_double(k, v);
    } else if (k == "sce.convergence_window") {
        c.sce.convergence_window = static_cast<int>(detail::config_int(k, v));
    } else if (auto name = suffix("range.")) {
        const auto b = parse_double_list(k, v);
        if (b.size() != 2) throw ConfigError("'" + k + "' expects lo,hi");
        if (!(b[0] < b[1])) throw ConfigError("'" + k + "' needs lo < hi");
        std::erase_if(c.ranges, [&](const auto& r) { return r.first == *name; });
        c.ranges.emplace_back(*name, std::make_pair(b[0], b[1]));
    } else if (auto pname = suffix("param.")) {
        c.params[*pname] = detail::config_double(k, v);
    } else if (auto store = suffix("init.")) {
        const double x = detail::config_double(k, v);
        if (!(x >= 0.0)) throw ConfigError("'" + k + "' must be >= 0");
        c.init[*store] = x;
    } else if (auto metric = suffix("sce_hmv.")) {
        auto m = parse_metric(*metric);
        if (!m) throw ConfigError("unknown metric in '" + k + "'");
        c.sce_hmv[*m] = detail::config_double(k, v);
    } else {
        throw ConfigError("unknown config key '" + k + "'");
    }
}

inline void parse_config(RunConfig& c, std::istream& in, const std::string& origin = "config") {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = csv::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(c, t.substr(0, eq), t.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline void load_config(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    parse_config(c, in, path);
}

}  // namespace mwh
