#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "mwh/error.hpp"

namespace mwh {

enum class ModelId { Simhyd, Sacramento };

constexpr std::string_view to_string(ModelId m) noexcept {
    return m == ModelId::Simhyd ? "simhyd" : "sacramento";
}

inline std::optional<ModelId> parse_model(std::string_view s) {
    if (s == "simhyd" || s == "SIMHYD") return ModelId::Simhyd;
    if (s == "sacramento" || s == "SACRAMENTO") return ModelId::Sacramento;
    return std::nullopt;
}

/// One day of runoff, split into the three modes of model response.
/// All quantities in mm/day.
struct DailyFluxes {
    double intensity = 0.0;  // infiltration-excess type runoff
    double wetness = 0.0;    // interflow and saturation-excess type runoff
    double slow = 0.0;       // baseflow
    double total = 0.0;      // intensity + wetness + slow
    double aet = 0.0;        // actual evapotranspiration
    double deep_loss = 0.0;  // water leaving the system outside the channel
};

/// Volumetric share of each response mode over a simulation window.
struct FluxFractions {
    double intensity = 0.0;
    double wetness = 0.0;
    double slow = 0.0;

    /// Normalizes volumes; nullopt when the total volume is not positive.
    static std::optional<FluxFractions> from_volumes(double intensity, double wetness,
                                                     double slow) {
        const double total = intensity + wetness + slow;
        if (!(total > 0.0)) return std::nullopt;
        return FluxFractions{intensity / total, wetness / total, slow / total};
    }

    bool valid(double tol = 1e-9) const noexcept {
        for (double f : {intensity, wetness, slow})
            if (!(f >= -tol && f <= 1.0 + tol)) return false;
        return std::abs(intensity + wetness + slow - 1.0) <= tol;
    }
};

}  // namespace mwh
