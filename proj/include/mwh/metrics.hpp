#pragma once

// Efficiency metrics: Nash-Sutcliffe (NSE), the skill-score form of the
// Kling-Gupta efficiency with coefficient-of-variation variability term
// (KGEss), and Willmott's refined index of agreement (WIA).
//
// All three return exactly 1 for a perfect match. Undefined intermediates
// (zero observed variance, zero mean) raise ComputeError instead of
// producing NaN.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mwh/error.hpp"
#include "mwh/series.hpp"

namespace mwh {

enum class MetricId { Nse, Kgess, Wia };

inline constexpr std::array<MetricId, 3> kAllMetrics{MetricId::Nse, MetricId::Kgess,
                                                     MetricId::Wia};

constexpr std::size_t index_of(MetricId m) noexcept { return static_cast<std::size_t>(m); }

constexpr std::string_view to_string(MetricId m) noexcept {
    switch (m) {
        case MetricId::Nse: return "nse";
        case MetricId::Kgess: return "kgess";
        case MetricId::Wia: return "wia";
    }
    return "?";
}

inline std::optional<MetricId> parse_metric(std::string_view s) {
    for (auto m : kAllMetrics)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

/// KGE of the observed-mean benchmark, the reference of the skill score.
inline const double kKgeMeanBenchmark = 1.0 - std::sqrt(2.0);

struct KgeComponents {
    double bias_term = 0.0;         // (1 - mean_sim / mean_obs)^2
    double variability_term = 0.0;  // (1 - cv_sim / cv_obs)^2
    double correlation_term = 0.0;  // (1 - cc)^2
    double kge = 1.0;
    double kge_ss = 1.0;
};

/// Skill score of a KGE value against the mean benchmark 1 - sqrt(2).
inline double kge_skill_score(double kge) { return 1.0 - (1.0 - kge) / std::sqrt(2.0); }

namespace detail {

inline void check_pair(std::span<const double> obs, std::span<const double> sim) {
    if (obs.size() != sim.size())
        throw DataError("observed and simulated series differ in length (" +
                        std::to_string(obs.size()) + " vs " + std::to_string(sim.size()) + ")");
    if (obs.size() < 2) throw DataError("metrics need at least 2 values");
}

}  // namespace detail

inline double nse(std::span<const double> obs, std::span<const double> sim) {
    detail::check_pair(obs, sim);
    const double mean_obs = mean_of(obs);
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        sse += (sim[i] - obs[i]) * (sim[i] - obs[i]);
        sst += (obs[i] - mean_obs) * (obs[i] - mean_obs);
    }
    if (sst == 0.0) throw ComputeError("NSE undefined: constant observed series");
    return 1.0 - sse / sst;
}

inline KgeComponents kge_components(std::span<const double> obs, std::span<const double> sim) {
    detail::check_pair(obs, sim);
    const auto so = summary_stats(obs);
    const auto sm = summary_stats(sim);
    if (so.mean == 0.0) throw ComputeError("KGE undefined: zero observed mean");
    if (sm.mean == 0.0) throw ComputeError("KGE undefined: zero simulated mean");
    if (so.std == 0.0) throw ComputeError("KGE undefined: constant observed series");
    if (sm.std == 0.0) throw ComputeError("KGE undefined: constant simulated series");

    KgeComponents c;
    const double cc = pearson_cc(obs, sim);
    const double bias = 1.0 - sm.mean / so.mean;
    const double variability = 1.0 - sm.cv() / so.cv();
    c.bias_term = bias * bias;
    c.variability_term = variability * variability;
    c.correlation_term = (1.0 - cc) * (1.0 - cc);
    c.kge = 1.0 - std::sqrt(c.bias_term + c.variability_term + c.correlation_term);
    c.kge_ss = kge_skill_score(c.kge);
    return c;
}

inline double kge_ss(std::span<const double> obs, std::span<const double> sim) {
    return kge_components(obs, sim).kge_ss;
}

/// Refined index of agreement. The A == D boundary takes the first branch;
/// both branches are 0 there.
inline double wia(std::span<const double> obs, std::span<const double> sim) {
    detail::check_pair(obs, sim);
    const double mean_obs = mean_of(obs);
    double abs_err = 0.0, abs_dev = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        abs_err += std::abs(sim[i] - obs[i]);
        abs_dev += std::abs(obs[i] - mean_obs);
    }
    if (abs_dev == 0.0) throw ComputeError("WIA undefined: constant observed series");
    const double d = 2.0 * abs_dev;
    if (abs_err <= d) return 1.0 - abs_err / d;
    return d / abs_err - 1.0;
}

inline double evaluate(MetricId metric, std::span<const double> obs,
                       std::span<const double> sim) {
    switch (metric) {
        case MetricId::Nse: return nse(obs, sim);
        case MetricId::Kgess: return kge_components(obs, sim).kge_ss;
        case MetricId::Wia: return wia(obs, sim);
    }
    throw ConfigError("unknown metric");
}

inline double nse(const Series& obs, const Series& sim) { return nse(obs.values(), sim.values()); }
inline KgeComponents kge_components(const Series& obs, const Series& sim) {
    return kge_components(obs.values(), sim.values());
}
inline double wia(const Series& obs, const Series& sim) { return wia(obs.values(), sim.values()); }
inline double evaluate(MetricId metric, const Series& obs, const Series& sim) {
    return evaluate(metric, obs.values(), sim.values());
}

}  // namespace mwh
