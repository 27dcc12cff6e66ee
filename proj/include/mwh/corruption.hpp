#pragma once

// One-factor-at-a-time metric sensitivity harness. An observed series O is
// corrupted in 20 steps under three error regimes, each holding the other
// two summary statistics fixed:
//
//   bias         B^k = O + 0.05k * mean(O)             std, CC kept
//   variability  V^k = mean + (1 + 0.05k)(O - mean)    mean, CC kept
//   correlation  C^k = mean + std * (r z + sqrt(1 - r^2) z_perp),
//                r = 1 - 0.05k                          mean, std kept
//
// z is the standardized series and z_perp a zero-mean, unit-std series
// exactly orthogonal to it, drawn once per seed and shared by all steps.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwh/error.hpp"
#include "mwh/metrics.hpp"
#include "mwh/sampling/rng.hpp"
#include "mwh/series.hpp"

namespace mwh {

enum class ErrorRegime { Bias, Variability, Correlation };

inline constexpr std::array<ErrorRegime, 3> kAllRegimes{ErrorRegime::Bias, ErrorRegime::Variability,
                                                        ErrorRegime::Correlation};

inline constexpr int kCorruptionSteps = 20;

constexpr std::string_view to_string(ErrorRegime r) noexcept {
    switch (r) {
        case ErrorRegime::Bias: return "bias";
        case ErrorRegime::Variability: return "variability";
        case ErrorRegime::Correlation: return "correlation";
    }
    return "?";
}

struct CorruptionStep {
    ErrorRegime regime;
    int k;
    Series series;
    Series residuals;  // series - original
};

struct DegradationCurve {
    MetricId metric;
    ErrorRegime regime;
    std::array<double, kCorruptionSteps + 1> values{};  // indexed by step k
};

namespace detail {

inline void check_step(int k) {
    if (k < 0 || k > kCorruptionSteps)
        throw ConfigError("corruption step must be in [0, 20], got " + std::to_string(k));
}

/// Fraction 0.05k computed as k / 20 to avoid accumulating 0.05's rounding.
inline double step_fraction(int k) { return static_cast<double>(k) / kCorruptionSteps; }

inline CorruptionStep make_step(ErrorRegime regime, int k, const Series& o,
                                std::vector<double> values) {
    std::vector<double> resid(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) resid[i] = values[i] - o[i];
    return {regime, k, Series(o.start_date(), std::move(values)),
            Series(o.start_date(), std::move(resid))};
}

inline CorruptionStep identity_step(ErrorRegime regime, const Series& o) {
    return make_step(regime, 0, o, std::vector<double>(o.values().begin(), o.values().end()));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void remove_mean(std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

/// Rescales a zero-mean vector to unit population standard deviation.
inline void unit_std(std::vector<double>& v) {
    const double sd = std::sqrt(dot(v, v) / static_cast<double>(v.size()));
    for (double& x : v) x /= sd;
}

}  // namespace detail

/// Standardized series: zero mean, unit population std.
inline std::vector<double> standardize(const Series& o) {
    const auto st = summary_stats(o);
    if (st.std == 0.0) throw ComputeError("cannot standardize a constant series");
    std::vector<double> z(o.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (o[i] - st.mean) / st.std;
    return z;
}

/// Zero-mean, unit-std vector orthogonal to the standardized series: a
/// seeded uniform draw, Gram-Schmidt against the constant vector and z
/// (applied twice for accuracy). Collinear draws are retried with an
/// incremented sub-seed, up to 16 attempts.
inline std::vector<double> orthogonal_complement(const Series& o, std::uint64_t seed) {
    if (o.size() < 3) throw DataError("correlation corruption needs at least 3 values");
    auto z = standardize(o);
    detail::remove_mean(z);
    const double zz = detail::dot(z, z);
    const double n = static_cast<double>(o.size());
    const CounterRng master(seed, 0x434F5252);  // "CORR"
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        auto rng = master.substream(attempt);
        std::vector<double> v(o.size());
        for (double& x : v) x = rng.uniform() - 0.5;
        for (int pass = 0; pass < 2; ++pass) {
            detail::remove_mean(v);
            const double proj = detail::dot(v, z) / zz;
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * z[i];
        }
        const double norm = std::sqrt(detail::dot(v, v));
        if (norm < 1e-8 * n) continue;
        detail::unit_std(v);
        return v;
    }
    throw ComputeError("could not construct an orthogonal component after 16 attempts");
}

inline CorruptionStep corrupt_bias(const Series& o, int k) {
    detail::check_step(k);
    const double mean = mean_of(o.values());
    if (mean == 0.0) throw ComputeError("bias corruption needs a non-zero mean");
    if (k == 0) return detail::identity_step(ErrorRegime::Bias, o);
    const double shift = detail::step_fraction(k) * mean;
    std::vector<double> v(o.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = o[i] + shift;
    return detail::make_step(ErrorRegime::Bias, k, o, std::move(v));
}

inline CorruptionStep corrupt_variability(const Series& o, int k) {
    detail::check_step(k);
    const auto st = summary_stats(o);
    if (st.std == 0.0) throw ComputeError("variability corruption needs a non-constant series");
    if (k == 0) return detail::identity_step(ErrorRegime::Variability, o);
    const double scale = 1.0 + detail::step_fraction(k);
    std::vector<double> v(o.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.mean + scale * (o[i] - st.mean);
    return detail::make_step(ErrorRegime::Variability, k, o, std::move(v));
}

/// Correlation corruption with a precomputed orthogonal component (so a
/// whole step sequence shares one).
inline CorruptionStep corrupt_correlation(const Series& o, int k,
                                          const std::vector<double>& z_perp) {
    detail::check_step(k);
    if (z_perp.size() != o.size()) throw DataError("orthogonal component length mismatch");
    if (k == 0) return detail::identity_step(ErrorRegime::Correlation, o);
    const auto st = summary_stats(o);
    const auto z = standardize(o);
    const double rho = 1.0 - detail::step_fraction(k);
    const double ortho = std::sqrt(1.0 - rho * rho);
    std::vector<double> v(o.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = st.mean + st.std * (rho * z[i] + ortho * z_perp[i]);
    return detail::make_step(ErrorRegime::Correlation, k, o, std::move(v));
}

inline CorruptionStep corrupt_correlation(const Series& o, int k, std::uint64_t seed) {
    detail::check_step(k);
    if (summary_stats(o).std == 0.0)
        throw ComputeError("correlation corruption needs a non-constant series");
    if (o.size() < 3) throw DataError("correlation corruption needs at least 3 values");
    if (k == 0) return detail::identity_step(ErrorRegime::Correlation, o);
    return corrupt_correlation(o, k, orthogonal_complement(o, seed));
}

/// All 21 steps (k = 0..20) of one regime.
inline std::vector<CorruptionStep> corruption_path(const Series& o, ErrorRegime regime,
                                                   std::uint64_t seed) {
    std::vector<CorruptionStep> steps;
    steps.reserve(kCorruptionSteps + 1);
    std::vector<double> z_perp;
    if (regime == ErrorRegime::Correlation) z_perp = orthogonal_complement(o, seed);
    for (int k = 0; k <= kCorruptionSteps; ++k) {
        switch (regime) {
            case ErrorRegime::Bias: steps.push_back(corrupt_bias(o, k)); break;
            case ErrorRegime::Variability: steps.push_back(corrupt_variability(o, k)); break;
            case ErrorRegime::Correlation: steps.push_back(corrupt_correlation(o, k, z_perp)); break;
        }
    }
    return steps;
}

/// Nine curves ordered metric-major (nse, kgess, wia) then regime (bias,
/// variability, correlation).
inline std::vector<DegradationCurve> degradation_table(const Series& o, std::uint64_t seed) {
    std::array<std::vector<CorruptionStep>, 3> paths;
    for (auto r : kAllRegimes) paths[static_cast<std::size_t>(r)] = corruption_path(o, r, seed);
    std::vector<DegradationCurve> curves;
    for (auto m : kAllMetrics) {
        for (auto r : kAllRegimes) {
            DegradationCurve c{m, r, {}};
            for (int k = 0; k <= kCorruptionSteps; ++k)
                c.values[static_cast<std::size_t>(k)] =
                    evaluate(m, o, paths[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)].series);
            curves.push_back(c);
        }
    }
    return curves;
}

using ResidualTable = std::map<std::pair<ErrorRegime, int>, Series>;

inline ResidualTable residual_table(const Series& o, std::uint64_t seed) {
    ResidualTable table;
    for (auto r : kAllRegimes)
        for (auto& step : corruption_path(o, r, seed))
            table.emplace(std::make_pair(r, step.k), std::move(step.residuals));
    return table;
}

}  // namespace mwh
