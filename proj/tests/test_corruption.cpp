#include <gtest/gtest.h>

#include <cmath>

#include "mwh/corruption.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace mwh;
using namespace mwh::testing;

namespace {

constexpr std::uint64_t kSeed = 1;

void expect_rel(double actual, double expected, double tol, const char* what) {
    EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected))) << what;
}

const DegradationCurve& curve(const std::vector<DegradationCurve>& t, MetricId m, ErrorRegime r) {
    for (const auto& c : t)
        if (c.metric == m && c.regime == r) return c;
    throw std::logic_error("curve missing");
}

}  // namespace

TEST(CorruptBias, Examples) {
    const Series o(kDefaultStartDate, {1, 3});
    const auto s = corrupt_bias(o, 10);
    EXPECT_EQ(s.series[0], 2.0);
    EXPECT_EQ(s.series[1], 4.0);
    const auto f = flashy45();
    EXPECT_NEAR(mean_of(corrupt_bias(f, 20).series.values()), 2.0 * mean_of(f.values()), 1e-12);
    EXPECT_THROW(corrupt_bias(Series(kDefaultStartDate, {-1, 1}), 3), ComputeError);
}

TEST(CorruptVariability, Examples) {
    const Series o(kDefaultStartDate, {0, 2});
    const auto s = corrupt_variability(o, 20);
    EXPECT_EQ(s.series[0], -1.0);
    EXPECT_EQ(s.series[1], 3.0);
    const auto f = flashy45();
    EXPECT_NEAR(summary_stats(corrupt_variability(f, 20).series).std, 2.0 * summary_stats(f).std, 1e-12);
    EXPECT_THROW(corrupt_variability(Series(kDefaultStartDate, {1, 1}), 3), ComputeError);
}

TEST(CorruptCorrelation, StepTwentyIsUncorrelated) {
    const auto f = flashy45();
    EXPECT_NEAR(pearson_cc(f, corrupt_correlation(f, 20, kSeed).series), 0.0, 1e-12);
    EXPECT_THROW(corrupt_correlation(Series(kDefaultStartDate, {1, 2}), 3, kSeed), DataError);
    EXPECT_THROW(corrupt_correlation(Series(kDefaultStartDate, {1, 1, 1}), 3, kSeed), ComputeError);
}

TEST(Corruption, StepZeroIsIdentity) {
    const auto f = flashy45();
    for (auto r : kAllRegimes) {
        const auto path = corruption_path(f, r, kSeed);
        EXPECT_EQ(path[0].series, f);
        for (double x : path[0].residuals.values()) EXPECT_EQ(x, 0.0);
    }
}

TEST(Corruption, StepOutOfRange) {
    const auto f = flashy45();
    EXPECT_THROW(corrupt_bias(f, 21), ConfigError);
    EXPECT_THROW(corrupt_variability(f, -1), ConfigError);
}

TEST(Corruption, MomentConstraintsOnFuzzedSeries) {
    Gen g(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto o = g.flow_series(g.size(3, 400));
        const auto so = summary_stats(o);
        const auto seed = static_cast<std::uint64_t>(trial);
        for (auto r : kAllRegimes) {
            for (const auto& step : corruption_path(o, r, seed)) {
                const auto ss = summary_stats(step.series);
                const double b = frac(step.k);
                const double cc = pearson_cc(o, step.series);
                switch (r) {
                    case ErrorRegime::Bias:
                        expect_rel(ss.mean, so.mean * (1 + b), 1e-10, "bias mean");
                        expect_rel(ss.std, so.std, 1e-10, "bias std");
                        expect_rel(cc, 1.0, 1e-10, "bias cc");
                        for (double e : step.residuals.values()) expect_rel(e, b * so.mean, 1e-10, "bias resid");
                        break;
                    case ErrorRegime::Variability:
                        expect_rel(ss.mean, so.mean, 1e-10, "var mean");
                        expect_rel(ss.std, so.std * (1 + b), 1e-10, "var std");
                        expect_rel(cc, 1.0, 1e-10, "var cc");
                        for (std::size_t i = 0; i < o.size(); ++i)
                            EXPECT_NEAR(step.residuals[i], b * (o[i] - so.mean), 1e-10 * (1 + std::abs(o[i])));
                        break;
                    case ErrorRegime::Correlation:
                        expect_rel(ss.mean, so.mean, 1e-10, "corr mean");
                        expect_rel(ss.std, so.std, 1e-10, "corr std");
                        EXPECT_NEAR(cc, 1.0 - b, 1e-10);
                        break;
                }
            }
        }
    }
}

TEST(Corruption, OrthogonalComplementIsExact) {
    Gen g(43);
    for (int trial = 0; trial < 50; ++trial) {
        const auto o = g.flow_series(g.size(3, 300));
        const auto z = standardize(o);
        const auto zp = orthogonal_complement(o, static_cast<std::uint64_t>(trial));
        double s = 0, ss = 0, dot = 0;
        for (std::size_t i = 0; i < zp.size(); ++i) s += zp[i], ss += zp[i] * zp[i], dot += zp[i] * z[i];
        const double n = static_cast<double>(zp.size());
        EXPECT_NEAR(s / n, 0.0, 1e-12);
        EXPECT_NEAR(ss / n, 1.0, 1e-12);
        EXPECT_NEAR(dot / n, 0.0, 1e-12);
    }
}

TEST(Corruption, DeterministicPerSeed) {
    const auto f = flashy45();
    const auto a = corrupt_correlation(f, 7, 99u).series;
    const auto b = corrupt_correlation(f, 7, 99u).series;
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a == corrupt_correlation(f, 7, 100u).series);
}

TEST(DegradationTable, ShapeAndClosedForms) {
    const auto o = flashy45();
    const auto st = summary_stats(o);
    const auto t = degradation_table(o, kSeed);
    ASSERT_EQ(t.size(), 9u);
    for (const auto& c : t) EXPECT_EQ(c.values[0], 1.0);
    for (int k = 0; k <= 20; ++k) {
        const auto i = static_cast<std::size_t>(k);
        EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Variability).values[i], nse_var(k), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Correlation).values[i], nse_corr(k), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Bias).values[i], nse_bias(k, st.mean, st.std), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Kgess, ErrorRegime::Variability).values[i], kgess_var(k), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Kgess, ErrorRegime::Correlation).values[i], kgess_corr(k), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Kgess, ErrorRegime::Bias).values[i], kgess_bias(k), 1e-9);
        EXPECT_NEAR(curve(t, MetricId::Wia, ErrorRegime::Variability).values[i], wia_var(k), 1e-9);
        if (k >= 1) {
            EXPECT_LE(curve(t, MetricId::Kgess, ErrorRegime::Bias).values[i],
                      curve(t, MetricId::Kgess, ErrorRegime::Variability).values[i]);
        }
    }
}

TEST(DegradationTable, ClosedFormsOnFuzzedSeries) {
    Gen g(47);
    for (int trial = 0; trial < 30; ++trial) {
        const auto o = g.flow_series(g.size(3, 200));
        const auto st = summary_stats(o);
        const auto t = degradation_table(o, static_cast<std::uint64_t>(trial));
        for (int k = 0; k <= 20; ++k) {
            const auto i = static_cast<std::size_t>(k);
            EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Variability).values[i], nse_var(k), 1e-9);
            EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Correlation).values[i], nse_corr(k), 1e-9);
            EXPECT_NEAR(curve(t, MetricId::Nse, ErrorRegime::Bias).values[i],
                        nse_bias(k, st.mean, st.std), 1e-9 * std::max(1.0, std::abs(nse_bias(k, st.mean, st.std))));
            EXPECT_NEAR(curve(t, MetricId::Kgess, ErrorRegime::Correlation).values[i], kgess_corr(k), 1e-9);
            EXPECT_NEAR(curve(t, MetricId::Kgess, ErrorRegime::Bias).values[i], kgess_bias(k), 1e-9);
            EXPECT_NEAR(curve(t, MetricId::Wia, ErrorRegime::Variability).values[i], wia_var(k), 1e-9);
        }
    }
}

TEST(DegradationTable, BiasOrderingAndMonotonicityOnTestSeries) {
    const auto t = degradation_table(flashy45(), kSeed);
    for (std::size_t k = 1; k <= 20; ++k) {
        const double n = curve(t, MetricId::Nse, ErrorRegime::Bias).values[k];
        const double w = curve(t, MetricId::Wia, ErrorRegime::Bias).values[k];
        const double s = curve(t, MetricId::Kgess, ErrorRegime::Bias).values[k];
        EXPECT_GT(n, w) << "k=" << k;
        EXPECT_GT(w, s) << "k=" << k;
    }
    for (const auto& c : t)
        for (std::size_t k = 1; k <= 20; ++k)
            EXPECT_LE(c.values[k], c.values[k - 1])
                << to_string(c.metric) << "/" << to_string(c.regime) << " k=" << k;
}

TEST(ResidualTable, Shapes) {
    const auto o = flashy45();
    const auto t = residual_table(o, kSeed);
    EXPECT_EQ(t.size(), 63u);
    const double m = mean_of(o.values());
    for (double e : t.at({ErrorRegime::Bias, 4}).values()) EXPECT_NEAR(e, 0.2 * m, 1e-12);
    for (std::size_t i = 0; i < o.size(); ++i)
        EXPECT_NEAR(t.at({ErrorRegime::Variability, 6}).values()[i], 0.3 * (o[i] - m), 1e-12);
    for (auto r : kAllRegimes)
        for (double e : t.at({r, 0}).values()) EXPECT_EQ(e, 0.0);
}
