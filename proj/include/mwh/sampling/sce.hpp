#pragma once

// Shuffled Complex Evolution (SCE-UA) global search, maximizing an
// objective over a box. Follows the competitive complex evolution scheme:
// rank-striped complexes, triangular-probability sub-complex selection,
// simplex reflection and contraction, and random replacement inside the
// smallest hypercube enclosing the complex.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mwh/error.hpp"
#include "mwh/parallel.hpp"
#include "mwh/sampling/parameter_space.hpp"
#include "mwh/sampling/rng.hpp"

namespace mwh {

struct SceConfig {
    int n_complexes = 4;
    int points_per_complex = 0;  // 0 -> 2 * dims + 1
    int subcomplex_size = 0;     // 0 -> dims + 1
    int evolution_steps = 0;     // 0 -> 2 * dims + 1
    long long max_evals = 50'000;
    double convergence_tol = 1e-4;
    int convergence_window = 10;
    std::uint64_t seed = 1;

    int resolved_points_per_complex(std::size_t dims) const {
        return points_per_complex > 0 ? points_per_complex : static_cast<int>(2 * dims + 1);
    }
    int resolved_subcomplex_size(std::size_t dims) const {
        return subcomplex_size > 0 ? subcomplex_size : static_cast<int>(dims + 1);
    }
    int resolved_evolution_steps(std::size_t dims) const {
        return evolution_steps > 0 ? evolution_steps : static_cast<int>(2 * dims + 1);
    }

    void validate(std::size_t dims) const {
        if (n_complexes < 2) throw ConfigError("SCE needs at least 2 complexes");
        const int m = resolved_points_per_complex(dims);
        if (m < static_cast<int>(dims) + 2)
            throw ConfigError("SCE points_per_complex must be >= dims + 2");
        const int q = resolved_subcomplex_size(dims);
        if (q < 2 || q > m) throw ConfigError("SCE subcomplex_size must be in [2, points_per_complex]");
        if (max_evals <= 0) throw ConfigError("SCE max_evals must be > 0");
        if (convergence_window < 1) throw ConfigError("SCE convergence_window must be >= 1");
        if (!(convergence_tol >= 0.0)) throw ConfigError("SCE convergence_tol must be >= 0");
    }
};

struct SearchResult {
    ParameterSet best_params;
    double best_value = -std::numeric_limits<double>::infinity();
    long long evals_used = 0;
    long long failed_evals = 0;
    std::vector<double> trace;  // best-so-far after the initial population and each shuffle
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

struct ScePoint {
    ParameterSet x;
    double f;
};

inline bool better(const ScePoint& a, const ScePoint& b) { return a.f > b.f; }

class SceRun {
public:
    SceRun(const Objective& objective, const ParameterSpace& space, const SceConfig& config)
        : objective_(objective), space_(space), config_(config), rng_(config.seed, 0x534345) {}

    SearchResult run() {
        const std::size_t n = space_.size();
        const int p = config_.n_complexes;
        const int m = config_.resolved_points_per_complex(n);
        const std::size_t s = static_cast<std::size_t>(p) * static_cast<std::size_t>(m);

        std::vector<ScePoint> population;
        population.reserve(s);
        for (std::size_t i = 0; i < s; ++i) {
            ParameterSet x(n);
            for (std::size_t d = 0; d < n; ++d) x[d] = rng_.uniform(space_[d].lower, space_[d].upper);
            const double f = evaluate(x);
            population.push_back({std::move(x), f});
        }
        std::stable_sort(population.begin(), population.end(), better);
        record(population.front());

        std::vector<ScePoint> complex(static_cast<std::size_t>(m));
        while (!budget_exhausted() && !converged()) {
            for (int k = 0; k < p && !budget_exhausted(); ++k) {
                for (int j = 0; j < m; ++j) complex[j] = population[static_cast<std::size_t>(k + p * j)];
                evolve(complex);
                for (int j = 0; j < m; ++j) population[static_cast<std::size_t>(k + p * j)] = complex[j];
            }
            std::stable_sort(population.begin(), population.end(), better);
            record(population.front());
        }
        return std::move(result_);
    }

private:
    double evaluate(std::span<const double> x) {
        ++result_.evals_used;
        double f;
        try {
            f = objective_(x);
        } catch (const Error&) {
            f = -std::numeric_limits<double>::infinity();
        }
        if (std::isnan(f)) f = -std::numeric_limits<double>::infinity();
        if (f == -std::numeric_limits<double>::infinity()) ++result_.failed_evals;
        return f;
    }

    bool budget_exhausted() const { return result_.evals_used >= config_.max_evals; }

    void record(const ScePoint& best) {
        if (result_.trace.empty() || best.f > result_.best_value) {
            result_.best_value = best.f;
            result_.best_params = best.x;
        }
        result_.trace.push_back(result_.best_value);
    }

    /// Relative improvement over the last `convergence_window` shuffles
    /// fell below the tolerance.
    bool converged() const {
        const auto& t = result_.trace;
        const auto w = static_cast<std::size_t>(config_.convergence_window);
        if (t.size() <= w) return false;
        const double now = t.back();
        const double before = t[t.size() - 1 - w];
        if (!std::isfinite(now) || !std::isfinite(before)) return false;
        const double scale = std::max({std::abs(now), std::abs(before), 1e-300});
        return (now - before) / scale < config_.convergence_tol;
    }

    ParameterSet random_in_hull(std::span<const ScePoint> complex) {
        const std::size_t n = space_.size();
        ParameterSet x(n);
        for (std::size_t d = 0; d < n; ++d) {
            double lo = complex[0].x[d], hi = lo;
            for (const auto& pt : complex) {
                lo = std::min(lo, pt.x[d]);
                hi = std::max(hi, pt.x[d]);
            }
            x[d] = rng_.uniform(lo, hi);
        }
        return x;
    }

    /// Competitive complex evolution of one complex sorted best-first.
    void evolve(std::vector<ScePoint>& complex) {
        const std::size_t n = space_.size();
        const std::size_t m = complex.size();
        const auto q = static_cast<std::size_t>(config_.resolved_subcomplex_size(n));
        const int beta = config_.resolved_evolution_steps(n);

        // Triangular selection weights: rank 0 is the most likely.
        std::vector<double> cumulative(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            acc += 2.0 * static_cast<double>(m - i) / (static_cast<double>(m) * static_cast<double>(m + 1));
            cumulative[i] = acc;
        }

        std::vector<std::size_t> chosen;
        std::vector<char> taken(m);
        ParameterSet centroid(n), trial(n);
        for (int step = 0; step < beta && !budget_exhausted(); ++step) {
            std::fill(taken.begin(), taken.end(), 0);
            chosen.clear();
            while (chosen.size() < q) {
                const double u = rng_.uniform() * acc;
                auto idx = static_cast<std::size_t>(
                    std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
                idx = std::min(idx, m - 1);
                if (!taken[idx]) {
                    taken[idx] = 1;
                    chosen.push_back(idx);
                }
            }
            std::sort(chosen.begin(), chosen.end());  // complex is sorted, so this sorts by fitness
            const std::size_t worst = chosen.back();

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t j = 0; j + 1 < q; ++j)
                for (std::size_t d = 0; d < n; ++d) centroid[d] += complex[chosen[j]].x[d];
            for (double& c : centroid) c /= static_cast<double>(q - 1);

            for (std::size_t d = 0; d < n; ++d) trial[d] = 2.0 * centroid[d] - complex[worst].x[d];
            if (!space_.contains(trial)) trial = random_in_hull(complex);
            double f = evaluate(trial);
            bool replace = f > complex[worst].f;
            if (!replace && !budget_exhausted()) {
                for (std::size_t d = 0; d < n; ++d)
                    trial[d] = 0.5 * (centroid[d] + complex[worst].x[d]);
                f = evaluate(trial);
                replace = f > complex[worst].f;
                if (!replace && !budget_exhausted()) {
                    // Mutation: accepted unconditionally. The worst point is
                    // never the best of the complex, so elitism holds.
                    trial = random_in_hull(complex);
                    f = evaluate(trial);
                    replace = true;
                }
            }
            if (replace) complex[worst] = {trial, f};
            std::stable_sort(complex.begin(), complex.end(), better);
        }
    }

    const Objective& objective_;
    const ParameterSpace& space_;
    const SceConfig& config_;
    CounterRng rng_;
    SearchResult result_;
};

}  // namespace detail

/// Maximizes `objective` over `space`. Objective errors (mwh::Error) and NaN
/// score -infinity and are counted in failed_evals.
inline SearchResult sce_optimize(const Objective& objective, const ParameterSpace& space,
                                 const SceConfig& config) {
    if (space.size() == 0) throw ConfigError("SCE needs at least one dimension");
    config.validate(space.size());
    return detail::SceRun(objective, space, config).run();
}

struct SceRepeats {
    double sce_hmv = -std::numeric_limits<double>::infinity();
    std::vector<SearchResult> results;
};

/// Runs sce_optimize with seeds seed + 0 ... seed + repeats - 1 and keeps
/// the highest best value. Repeats run concurrently on up to `threads`
/// workers; the objective must be safe to call concurrently.
inline SceRepeats sce_repeats(const Objective& objective, const ParameterSpace& space,
                              const SceConfig& config, int repeats = 10, unsigned threads = 1) {
    if (repeats < 1) throw ConfigError("SCE repeats must be >= 1");
    config.validate(space.size());
    SceRepeats out;
    out.results.resize(static_cast<std::size_t>(repeats));
    parallel_for(out.results.size(), threads, [&](std::size_t r) {
        SceConfig c = config;
        c.seed = config.seed + r;
        out.results[r] = sce_optimize(objective, space, c);
    });
    for (const auto& r : out.results) out.sce_hmv = std::max(out.sce_hmv, r.best_value);
    return out;
}

}  // namespace mwh
