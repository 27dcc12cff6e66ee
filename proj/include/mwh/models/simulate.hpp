#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mwh/error.hpp"
#include "mwh/models/sacramento.hpp"
#include "mwh/models/simhyd.hpp"
#include "mwh/models/types.hpp"
#include "mwh/series.hpp"

namespace mwh {

inline constexpr int kDefaultWarmupDays = 365;

/// Water accounting over the evaluation window, catchment-average mm.
struct WaterBalance {
    double precip = 0.0;
    double aet = 0.0;
    double flow = 0.0;
    double deep_loss = 0.0;
    double storage_change = 0.0;

    double residual() const noexcept { return precip - aet - flow - deep_loss - storage_change; }
};

struct SimulationOutput {
    Series flow;                       // total simulated flow, evaluation window
    std::vector<DailyFluxes> fluxes;   // same window
    std::vector<std::string> store_names;
    std::vector<std::vector<double>> state_trace;  // end-of-day store levels, when requested
    std::optional<FluxFractions> fractions;        // nullopt: zero total volume (degenerate)
    WaterBalance balance;

    bool degenerate() const noexcept { return !fractions.has_value(); }
};

using ModelState = std::variant<SimhydState, SacramentoState>;

struct SimulateOptions {
    int warmup_days = kDefaultWarmupDays;
    std::optional<ModelState> initial_state;  // empty stores by default
    bool keep_trace = false;
};

namespace detail {

inline double storage_of(const SimhydState& s, const SimhydParams&) { return s.storage(); }
inline double storage_of(const SacramentoState& s, const SacramentoParams& p) {
    return s.storage(p);
}
inline SimhydStep step(const SimhydState& s, const SimhydParams& p, double pr, double pet) {
    return simhyd_step(s, p, pr, pet);
}
inline SacramentoStep step(const SacramentoState& s, const SacramentoParams& p, double pr,
                           double pet) {
    return sacramento_step(s, p, pr, pet);
}

template <class Params, class State>
SimulationOutput run_model(const Params& params, const Forcing& forcing,
                           const SimulateOptions& options) {
    params.validate();
    if (options.warmup_days < 0) throw ConfigError("warm-up must be >= 0 days");
    const auto warmup = static_cast<std::size_t>(options.warmup_days);
    if (forcing.size() < warmup + 2)
        throw ConfigError("forcing has " + std::to_string(forcing.size()) +
                          " days; needs at least warm-up (" + std::to_string(warmup) +
                          ") + 2");

    State state{};
    if (options.initial_state) {
        if (!std::holds_alternative<State>(*options.initial_state))
            throw ConfigError("initial state does not match the model");
        state = std::get<State>(*options.initial_state);
        for (double v : state.values())
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("initial store levels must be finite and >= 0");
    }

    const auto precip = forcing.precip().values();
    const auto pet = forcing.pet().values();
    for (std::size_t t = 0; t < warmup; ++t) state = step(state, params, precip[t], pet[t]).state;

    const std::size_t n = forcing.size() - warmup;
    std::vector<double> flow(n);
    std::vector<DailyFluxes> fluxes(n);
    std::vector<std::vector<double>> trace;
    if (options.keep_trace) trace.reserve(n);

    WaterBalance wb;
    const double storage_start = storage_of(state, params);
    double vol_intensity = 0.0, vol_wetness = 0.0, vol_slow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto out = step(state, params, precip[warmup + i], pet[warmup + i]);
        state = out.state;
        fluxes[i] = out.fluxes;
        flow[i] = out.fluxes.total;
        vol_intensity += out.fluxes.intensity;
        vol_wetness += out.fluxes.wetness;
        vol_slow += out.fluxes.slow;
        wb.precip += precip[warmup + i];
        wb.aet += out.fluxes.aet;
        wb.flow += out.fluxes.total;
        wb.deep_loss += out.fluxes.deep_loss;
        if (options.keep_trace) {
            const auto v = state.values();
            trace.emplace_back(v.begin(), v.end());
        }
    }
    wb.storage_change = storage_of(state, params) - storage_start;

    SimulationOutput result{Series(forcing.precip().date_at(warmup), std::move(flow)),
                            std::move(fluxes),
                            {State::kNames.begin(), State::kNames.end()},
                            std::move(trace),
                            FluxFractions::from_volumes(vol_intensity, vol_wetness, vol_slow),
                            wb};
    return result;
}

}  // namespace detail

inline SimulationOutput simulate(const SimhydParams& params, const Forcing& forcing,
                                 const SimulateOptions& options = {}) {
    return detail::run_model<SimhydParams, SimhydState>(params, forcing, options);
}

inline SimulationOutput simulate(const SacramentoParams& params, const Forcing& forcing,
                                 const SimulateOptions& options = {}) {
    return detail::run_model<SacramentoParams, SacramentoState>(params, forcing, options);
}

/// Dispatch on a model id with parameter values in canonical name order.
inline SimulationOutput simulate(ModelId model, std::span<const double> values,
                                 const Forcing& forcing, const SimulateOptions& options = {}) {
    switch (model) {
        case ModelId::Simhyd: return simulate(SimhydParams::from_values(values), forcing, options);
        case ModelId::Sacramento:
            return simulate(SacramentoParams::from_values(values), forcing, options);
    }
    throw ConfigError("unknown model");
}

inline ParameterSpace default_space(ModelId model) {
    return model == ModelId::Simhyd ? SimhydParams::default_space()
                                    : SacramentoParams::default_space();
}

inline std::vector<std::string> store_names(ModelId model) {
    if (model == ModelId::Simhyd)
        return {SimhydState::kNames.begin(), SimhydState::kNames.end()};
    return {SacramentoState::kNames.begin(), SacramentoState::kNames.end()};
}

/// Builds an initial state from named store levels (unnamed stores empty).
template <class Lookup>
ModelState make_initial_state(ModelId model, Lookup&& level_of) {
    if (model == ModelId::Simhyd) {
        SimhydState s;
        s.sms = level_of("sms");
        s.gw = level_of("gw");
        return s;
    }
    SacramentoState s;
    s.uztwc = level_of("uztwc");
    s.uzfwc = level_of("uzfwc");
    s.lztwc = level_of("lztwc");
    s.lzfsc = level_of("lzfsc");
    s.lzfpc = level_of("lzfpc");
    s.adimc = level_of("adimc");
    return s;
}

}  // namespace mwh
