#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwh/corruption.hpp"
#include "mwh/metrics.hpp"
#include "support/gen.hpp"
#include "support/synthetic.hpp"

using namespace mwh;
using mwh::testing::Gen;

namespace {

std::vector<double> vec(const Series& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST(Nse, PerfectAndMeanBenchmark) {
    const auto o = mwh::testing::flashy45();
    EXPECT_EQ(nse(o, o), 1.0);
    std::vector<double> mean(o.size(), mean_of(o.values()));
    EXPECT_NEAR(nse(o.values(), mean), 0.0, 1e-15);
}

TEST(Nse, VariabilityAndCorrelationStep20) {
    const auto o = mwh::testing::flashy45();
    EXPECT_NEAR(nse(o, corrupt_variability(o, 20).series), 0.0, 1e-12);
    EXPECT_NEAR(nse(o, corrupt_correlation(o, 20, 1u).series), -1.0, 1e-12);
}

TEST(Nse, ConstantObservationsAreAnError) {
    const std::vector<double> c{2, 2, 2}, s{1, 2, 3};
    EXPECT_THROW(nse(c, s), ComputeError);
    EXPECT_THROW(wia(c, s), ComputeError);
    EXPECT_THROW(kge_components(c, s), ComputeError);
}

TEST(Kge, PerfectMatch) {
    const auto o = mwh::testing::flashy45();
    const auto k = kge_components(o, o);
    EXPECT_EQ(k.bias_term, 0.0);
    EXPECT_EQ(k.variability_term, 0.0);
    EXPECT_EQ(k.correlation_term, 0.0);
    EXPECT_EQ(k.kge, 1.0);
    EXPECT_EQ(k.kge_ss, 1.0);
}

TEST(Kge, MeanBenchmarkHasZeroSkill) {
    EXPECT_NEAR(kge_skill_score(1.0 - std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_EQ(kKgeMeanBenchmark, 1.0 - std::sqrt(2.0));
}

TEST(Kge, BiasStep20Terms) {
    const auto o = mwh::testing::flashy45();
    const auto k = kge_components(o, corrupt_bias(o, 20).series);
    EXPECT_NEAR(k.bias_term, 1.0, 1e-12);
    EXPECT_NEAR(k.variability_term, 0.25, 1e-12);
    EXPECT_NEAR(k.correlation_term, 0.0, 1e-12);
    EXPECT_NEAR(k.kge_ss, 1.0 - std::sqrt(1.25) / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(k.kge_ss, 0.2094, 5e-5);
}

TEST(Kge, CorrelationStep20Terms) {
    const auto o = mwh::testing::flashy45();
    const auto k = kge_components(o, corrupt_correlation(o, 20, 5u).series);
    EXPECT_NEAR(k.bias_term, 0.0, 1e-12);
    EXPECT_NEAR(k.variability_term, 0.0, 1e-12);
    EXPECT_NEAR(k.correlation_term, 1.0, 1e-12);
    EXPECT_NEAR(k.kge_ss, 1.0 - 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Kge, UndefinedIntermediatesAreErrors) {
    const std::vector<double> o{1, 2, 3}, zero_mean{-1, 0, 1}, flat{2, 2, 2};
    EXPECT_THROW(kge_components(zero_mean, o), ComputeError);
    EXPECT_THROW(kge_components(o, zero_mean), ComputeError);
    EXPECT_THROW(kge_components(o, flat), ComputeError);
}

TEST(Kge, InvariantsHoldOnRandomPairs) {
    Gen g(21);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = g.size(3, 60);
        const auto o = g.flow(n), s = g.flow(n);
        const auto k = kge_components(o, s);
        EXPECT_GE(k.bias_term, 0.0);
        EXPECT_GE(k.variability_term, 0.0);
        EXPECT_GE(k.correlation_term, 0.0);
        EXPECT_DOUBLE_EQ(k.kge, 1.0 - std::sqrt(k.bias_term + k.variability_term + k.correlation_term));
        EXPECT_DOUBLE_EQ(k.kge_ss, 1.0 - (1.0 - k.kge) / std::sqrt(2.0));
        EXPECT_EQ(k.kge_ss > 0.0, k.kge > 1.0 - std::sqrt(2.0));
    }
}

TEST(Wia, PerfectAndVariabilityStep20) {
    const auto o = mwh::testing::flashy45();
    EXPECT_EQ(wia(o, o), 1.0);
    EXPECT_NEAR(wia(o, corrupt_variability(o, 20).series), 0.5, 1e-12);
}

TEST(Wia, BranchArithmetic) {
    // obs {0, 2}: sum |O - mean| = 2, D = 4.
    const std::vector<double> o{0, 2};
    EXPECT_EQ(wia(o, std::vector<double>{4, 2}), 0.0);   // A == D
    EXPECT_EQ(wia(o, std::vector<double>{8, 2}), -0.5);  // A == 2D
    EXPECT_EQ(wia(o, std::vector<double>{2, 2}), 0.5);   // A == D/2
    // At the mean benchmark WIA is 0.5, not 0.
    std::vector<double> mean{1, 1};
    EXPECT_EQ(wia(o, mean), 0.5);
}

TEST(Wia, RangeAndContinuity) {
    Gen g(23);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = g.size(2, 60);
        const auto o = g.flow(n);
        auto s = g.reals(n, -1e4, 1e4);
        const double v = wia(o, s);
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Metrics, ExactlyOneOnlyForIdenticalSeries) {
    Gen g(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto o = g.flow(g.size(3, 80));
        for (auto m : kAllMetrics) EXPECT_EQ(evaluate(m, o, o), 1.0);
        auto s = o;
        s[g.size(0, s.size() - 1)] *= 1.0 + 1e-3;
        for (auto m : kAllMetrics) EXPECT_LT(evaluate(m, o, s), 1.0);
    }
}

TEST(Metrics, PermutationInvariance) {
    Gen g(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = g.size(3, 50);
        auto o = g.flow(n), s = g.flow(n);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), g.engine());
        std::vector<double> op(n), sp(n);
        for (std::size_t i = 0; i < n; ++i) op[i] = o[idx[i]], sp[i] = s[idx[i]];
        for (auto m : kAllMetrics) EXPECT_NEAR(evaluate(m, op, sp), evaluate(m, o, s), 1e-9);
    }
}

TEST(Metrics, UnboundedBelowForHugeBias) {
    const auto o = vec(mwh::testing::flashy45());
    auto s = o;
    for (auto& x : s) x += 1000.0;
    EXPECT_LT(nse(o, s), -10.0);
    EXPECT_LT(kge_ss(o, s), -10.0);
    EXPECT_GE(wia(o, s), -1.0);
}

TEST(Metrics, NamesRoundTrip) {
    for (auto m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
    EXPECT_EQ(to_string(MetricId::Kgess), "kgess");
    EXPECT_FALSE(parse_metric("rmse"));
}

TEST(Metrics, LengthMismatchIsAnError) {
    const std::vector<double> a{1, 2, 3}, b{1, 2};
    for (auto m : kAllMetrics) EXPECT_THROW(evaluate(m, a, b), DataError);
}
