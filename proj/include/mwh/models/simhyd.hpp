#pragma once

// SIMHYD daily rainfall-runoff model (7 parameters).
//
// Per day: interception (capped by capacity and PET) -> infiltration
// capacity coeff * exp(-sq * SMS/SMSC) -> infiltration excess runoff;
// interflow and groundwater recharge proportional to soil wetness; soil
// evaporation limited by 10 * SMS/SMSC; soil overflow above SMSC to
// groundwater; baseflow k * GW.
//
// Modes: intensity = infiltration excess, wetness = interflow,
// slow = baseflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>

#include "mwh/error.hpp"
#include "mwh/models/types.hpp"
#include "mwh/sampling/parameter_space.hpp"

namespace mwh {

struct SimhydParams {
    double insc = 2.0;     // interception store capacity (mm)
    double coeff = 200.0;  // maximum infiltration loss (mm)
    double sq = 1.5;       // infiltration loss exponent
    double smsc = 250.0;   // soil moisture store capacity (mm)
    double sub = 0.3;      // interflow constant
    double crak = 0.3;     // recharge constant
    double k = 0.1;        // baseflow recession coefficient (1/day)

    static constexpr std::array<std::string_view, 7> kNames{"insc", "coeff", "sq",  "smsc",
                                                            "sub",  "crak",  "k"};

    static SimhydParams from_values(std::span<const double> v) {
        if (v.size() != kNames.size())
            throw ConfigError("SIMHYD expects 7 parameter values, got " + std::to_string(v.size()));
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    }

    std::array<double, 7> values() const { return {insc, coeff, sq, smsc, sub, crak, k}; }

    /// Throws ConfigError when a value is physically infeasible.
    void validate() const {
        const auto v = values();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i]) || v[i] < 0.0)
                throw ConfigError("SIMHYD parameter '" + std::string(kNames[i]) +
                                  "' must be finite and >= 0");
        if (smsc <= 0.0) throw ConfigError("SIMHYD smsc must be > 0");
        if (sub > 1.0 || crak > 1.0 || k > 1.0)
            throw ConfigError("SIMHYD sub, crak and k must be <= 1");
    }

    static ParameterSpace default_space() {
        return ParameterSpace({{"insc", 0.5, 5.0},
                               {"coeff", 50.0, 400.0},
                               {"sq", 0.0, 6.0},
                               {"smsc", 50.0, 500.0},
                               {"sub", 0.0, 1.0},
                               {"crak", 0.0, 1.0},
                               {"k", 0.003, 0.3}});
    }
};

struct SimhydState {
    double sms = 0.0;  // soil moisture store (mm)
    double gw = 0.0;   // groundwater store (mm)

    static constexpr std::array<std::string_view, 2> kNames{"sms", "gw"};
    std::array<double, 2> values() const { return {sms, gw}; }
    double storage() const noexcept { return sms + gw; }
};

struct SimhydStep {
    SimhydState state;
    DailyFluxes fluxes;
};

inline SimhydStep simhyd_step(const SimhydState& s, const SimhydParams& p, double precip,
                              double pet) {
    SimhydStep out;
    auto& f = out.fluxes;
    auto& next = out.state;

    const double wetness = s.sms / p.smsc;

    // Interception, evaporated the same day.
    const double intercepted = std::min({precip, p.insc, pet});
    const double throughfall = precip - intercepted;

    // Infiltration excess.
    const double infiltration_capacity = p.coeff * std::exp(-p.sq * wetness);
    const double infiltration_excess = std::max(0.0, throughfall - infiltration_capacity);
    const double infiltration = throughfall - infiltration_excess;

    // Interflow and recharge from infiltrated water.
    const double interflow = p.sub * wetness * infiltration;
    const double recharge = p.crak * wetness * (infiltration - interflow);
    const double to_soil = infiltration - interflow - recharge;

    // Soil evaporation, limited by wetness and the remaining demand.
    const double remaining_pet = pet - intercepted;
    const double soil_et = std::min({10.0 * wetness, remaining_pet, s.sms + to_soil});

    double sms = s.sms + to_soil - soil_et;
    double overflow = 0.0;
    if (sms > p.smsc) {
        overflow = sms - p.smsc;
        sms = p.smsc;
    }
    sms = std::max(sms, 0.0);

    double gw = s.gw + recharge + overflow;
    const double baseflow = p.k * gw;
    gw -= baseflow;

    next.sms = sms;
    next.gw = gw;
    f.intensity = infiltration_excess;
    f.wetness = interflow;
    f.slow = baseflow;
    f.total = infiltration_excess + interflow + baseflow;
    f.aet = intercepted + soil_et;
    return out;
}

}  // namespace mwh
