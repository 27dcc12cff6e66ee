#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mwh/error.hpp"
#include "mwh/sampling/parameter_space.hpp"
#include "mwh/sampling/rng.hpp"

namespace mwh {

/// Latin Hypercube sample of `count` points. Each dimension draws from its
/// own sub-stream of `seed`: a random permutation of the strata and a
/// uniform offset inside each stratum.
inline std::vector<ParameterSet> lhs(const ParameterSpace& space, std::size_t count,
                                     std::uint64_t seed) {
    if (count < 1) throw ConfigError("LHS count must be >= 1");
    const CounterRng master(seed, /*stream=*/0x4C4853);  // "LHS"
    std::vector<ParameterSet> out(count, ParameterSet(space.size()));
    std::vector<std::uint64_t> strata(count);
    const double n = static_cast<double>(count);

    for (std::size_t d = 0; d < space.size(); ++d) {
        auto rng = master.substream(d);
        std::iota(strata.begin(), strata.end(), std::uint64_t{0});
        for (std::size_t i = count - 1; i > 0; --i) std::swap(strata[i], strata[rng.below(i + 1)]);

        const double lo = space[d].lower;
        const double width = space[d].upper - space[d].lower;
        for (std::size_t i = 0; i < count; ++i) {
            const double s = static_cast<double>(strata[i]);
            double v = lo + width * ((s + rng.uniform()) / n);
            // Keep rounding from pushing the value across a stratum edge.
            const auto cell = [&](double x) { return std::floor((x - lo) / width * n); };
            while (cell(v) > s) v = std::nextafter(v, -INFINITY);
            while (cell(v) < s) v = std::nextafter(v, INFINITY);
            out[i][d] = std::min(v, space[d].upper);
        }
    }
    return out;
}

}  // namespace mwh
