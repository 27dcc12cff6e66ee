#pragma once

// SACRAMENTO soil moisture accounting model, daily step (15 parameters).
//
// Structure of the classic NWS land-phase routine: upper-zone tension and
// free water, lower-zone tension, supplemental and primary free water, and
// the additional-impervious (ADIMP) area store. The day is split into
// increments for percolation, interflow, baseflow and surface runoff.
// Riparian evaporation and frozen ground are not modelled.
//
// Runoff components, weighted by the area generating them:
//   (1) impervious runoff          pctim * P               -> intensity
//   (2) ADIMP direct runoff                                  -> wetness
//   (3) surface runoff (pervious and ADIMP areas)           -> intensity
//   (4) interflow                                            -> wetness
//   (5) primary + supplemental baseflow, channel component  -> slow
// The non-channel baseflow share side / (1 + side) is a deep loss.

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

struct SacramentoParams {
    double uztwm = 50.0;   // upper zone tension water capacity (mm)
    double uzfwm = 40.0;   // upper zone free water capacity (mm)
    double lztwm = 130.0;  // lower zone tension water capacity (mm)
    double lzfsm = 25.0;   // lower zone supplemental free water capacity (mm)
    double lzfpm = 60.0;   // lower zone primary free water capacity (mm)
    double uzk = 0.3;      // interflow depletion rate (1/day)
    double lzsk = 0.05;    // supplemental baseflow depletion rate (1/day)
    double lzpk = 0.01;    // primary baseflow depletion rate (1/day)
    double zperc = 40.0;   // maximum percolation demand multiplier
    double rexp = 2.0;     // percolation curve exponent
    double pfree = 0.06;   // fraction of percolation direct to free water
    double pctim = 0.01;   // permanently impervious fraction
    double adimp = 0.0;    // additional impervious fraction
    double side = 0.0;     // deep recharge to channel baseflow ratio
    double rserv = 0.3;    // lower zone free water not available to transpiration

    static constexpr std::array<std::string_view, 15> kNames{
        "uztwm", "uzfwm", "lztwm", "lzfsm", "lzfpm", "uzk",   "lzsk", "lzpk",
        "zperc", "rexp",  "pfree", "pctim", "adimp", "side",  "rserv"};

    static SacramentoParams from_values(std::span<const double> v) {
        if (v.size() != kNames.size())
            throw ConfigError("SACRAMENTO expects 15 parameter values, got " +
                              std::to_string(v.size()));
        return {v[0], v[1], v[2],  v[3],  v[4],  v[5],  v[6], v[7],
                v[8], v[9], v[10], v[11], v[12], v[13], v[14]};
    }

    std::array<double, 15> values() const {
        return {uztwm, uzfwm, lztwm, lzfsm, lzfpm, uzk,   lzsk, lzpk,
                zperc, rexp,  pfree, pctim, adimp, side,  rserv};
    }

    void validate() const {
        const auto v = values();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i]) || v[i] < 0.0)
                throw ConfigError("SACRAMENTO parameter '" + std::string(kNames[i]) +
                                  "' must be finite and >= 0");
        for (double cap : {uztwm, uzfwm, lztwm, lzfsm, lzfpm})
            if (cap <= 0.0) throw ConfigError("SACRAMENTO store capacities must be > 0");
        for (double c : {uzk, lzsk, lzpk})
            if (c <= 0.0 || c > 1.0)
                throw ConfigError("SACRAMENTO depletion coefficients must be in (0, 1]");
        for (double fr : {pfree, pctim, adimp, rserv})
            if (fr > 1.0) throw ConfigError("SACRAMENTO fractions must be in [0, 1]");
        if (pctim + adimp > 1.0) throw ConfigError("SACRAMENTO pctim + adimp must be <= 1");
        if (rserv >= 1.0) throw ConfigError("SACRAMENTO rserv must be < 1");
    }

    static ParameterSpace default_space() {
        return ParameterSpace({{"uztwm", 10.0, 150.0},
                               {"uzfwm", 10.0, 150.0},
                               {"lztwm", 50.0, 400.0},
                               {"lzfsm", 10.0, 300.0},
                               {"lzfpm", 20.0, 600.0},
                               {"uzk", 0.1, 0.75},
                               {"lzsk", 0.02, 0.3},
                               {"lzpk", 0.001, 0.05},
                               {"zperc", 1.0, 250.0},
                               {"rexp", 1.0, 5.0},
                               {"pfree", 0.0, 0.6},
                               {"pctim", 0.0, 0.1},
                               {"adimp", 0.0, 0.3},
                               {"side", 0.0, 0.5},
                               {"rserv", 0.0, 0.4}});
    }
};

struct SacramentoState {
    double uztwc = 0.0;
    double uzfwc = 0.0;
    double lztwc = 0.0;
    double lzfsc = 0.0;
    double lzfpc = 0.0;
    double adimc = 0.0;

    static constexpr std::array<std::string_view, 6> kNames{"uztwc", "uzfwc", "lztwc",
                                                            "lzfsc", "lzfpc", "adimc"};
    std::array<double, 6> values() const { return {uztwc, uzfwc, lztwc, lzfsc, lzfpc, adimc}; }

    /// Catchment-average storage (mm): pervious stores over the pervious
    /// area, the ADIMP store over its own area.
    double storage(const SacramentoParams& p) const noexcept {
        const double parea = 1.0 - p.pctim - p.adimp;
        return parea * (uztwc + uzfwc + lztwc + lzfsc + lzfpc) + p.adimp * adimc;
    }
};

/// Per-day component breakdown, catchment-average mm.
struct SacramentoComponents {
    double impervious = 0.0;
    double direct = 0.0;
    double surface = 0.0;
    double interflow = 0.0;
    double baseflow = 0.0;  // channel component
    double primary_baseflow = 0.0;
    double supplemental_baseflow = 0.0;
};

struct SacramentoStep {
    SacramentoState state;
    DailyFluxes fluxes;
    SacramentoComponents components;
};

inline SacramentoStep sacramento_step(const SacramentoState& s0, const SacramentoParams& p,
                                      double precip, double pet) {
    SacramentoStep out;
    SacramentoState s = s0;
    const double parea = 1.0 - p.pctim - p.adimp;

    // --- Evapotranspiration -------------------------------------------------
    double e1 = pet * (s.uztwc / p.uztwm);
    double red = pet - e1;
    s.uztwc -= e1;
    double e2 = 0.0;
    bool rebalance = true;
    if (s.uztwc < 0.0) {
        e1 += s.uztwc;
        s.uztwc = 0.0;
        red = pet - e1;
        if (s.uzfwc < red) {
            e2 = s.uzfwc;
            s.uzfwc = 0.0;
            red -= e2;
            rebalance = false;
        } else {
            e2 = red;
            s.uzfwc -= e2;
            red = 0.0;
        }
    }
    if (rebalance && s.uztwc / p.uztwm < s.uzfwc / p.uzfwm) {
        // Free water ratio exceeds tension ratio: rebalance the upper zone.
        const double uzrat = (s.uztwc + s.uzfwc) / (p.uztwm + p.uzfwm);
        s.uztwc = p.uztwm * uzrat;
        s.uzfwc = p.uzfwm * uzrat;
    }

    double e3 = red * (s.lztwc / (p.uztwm + p.lztwm));
    s.lztwc -= e3;
    if (s.lztwc < 0.0) {
        e3 += s.lztwc;
        s.lztwc = 0.0;
    }

    const double saved = p.rserv * (p.lzfpm + p.lzfsm);
    const double ratlzt = s.lztwc / p.lztwm;
    const double ratlz =
        (s.lztwc + s.lzfpc + s.lzfsc - saved) / (p.lztwm + p.lzfpm + p.lzfsm - saved);
    if (ratlzt < ratlz) {
        // Resupply lower zone tension water from free water.
        const double del = (ratlz - ratlzt) * p.lztwm;
        s.lztwc += del;
        s.lzfsc -= del;
        if (s.lzfsc < 0.0) {
            s.lzfpc += s.lzfsc;
            s.lzfsc = 0.0;
        }
        if (s.lzfpc < 0.0) {
            s.lztwc += s.lzfpc;
            s.lzfpc = 0.0;
        }
    }

    double e5 = e1 + (red + e2) * ((s.adimc - e1 - s.uztwc) / (p.uztwm + p.lztwm));
    e5 = std::max(e5, 0.0);
    s.adimc -= e5;
    if (s.adimc < 0.0) {
        e5 += s.adimc;
        s.adimc = 0.0;
    }
    // e5 stays per unit ADIMP area until the final weighting.

    // --- Tension water filling ------------------------------------------------
    double twx = precip + s.uztwc - p.uztwm;  // moisture in excess of UZ tension needs
    if (twx < 0.0) {
        s.uztwc += precip;
        twx = 0.0;
    } else {
        s.uztwc = p.uztwm;
    }
    s.adimc += precip - twx;

    const double roimp = precip * p.pctim;

    // --- Incremental loop ---------------------------------------------------
    double sbf = 0.0, spbf = 0.0, ssur = 0.0, sif = 0.0, sdro = 0.0;
    const int ninc = static_cast<int>(std::floor(1.0 + 0.2 * (s.uzfwc + twx)));
    const double dinc = 1.0 / ninc;
    const double pinc = twx / ninc;
    const double duz = 1.0 - std::pow(1.0 - p.uzk, dinc);
    const double dlzp = 1.0 - std::pow(1.0 - p.lzpk, dinc);
    const double dlzs = 1.0 - std::pow(1.0 - p.lzsk, dinc);

    for (int i = 0; i < ninc; ++i) {
        double adsur = 0.0;
        const double ratio = std::clamp((s.adimc - s.uztwc) / p.lztwm, 0.0, 1.0);
        double addro = pinc * ratio * ratio;

        // Baseflow.
        double bf = s.lzfpc * dlzp;
        s.lzfpc -= bf;
        if (s.lzfpc <= 0.0001) {
            bf += s.lzfpc;
            s.lzfpc = 0.0;
        }
        sbf += bf;
        spbf += bf;
        bf = s.lzfsc * dlzs;
        s.lzfsc -= bf;
        if (s.lzfsc <= 0.0001) {
            bf += s.lzfsc;
            s.lzfsc = 0.0;
        }
        sbf += bf;

        if (pinc + s.uzfwc <= 0.01) {
            s.uzfwc += pinc;
        } else {
            // Percolation.
            const double percm = p.lzfpm * dlzp + p.lzfsm * dlzs;
            double perc = percm * (s.uzfwc / p.uzfwm);
            const double defr =
                1.0 - (s.lztwc + s.lzfpc + s.lzfsc) / (p.lztwm + p.lzfpm + p.lzfsm);
            perc *= 1.0 + p.zperc * std::pow(std::max(defr, 0.0), p.rexp);
            perc = std::min(perc, s.uzfwc);
            s.uzfwc -= perc;
            const double check =
                s.lztwc + s.lzfpc + s.lzfsc + perc - p.lztwm - p.lzfpm - p.lzfsm;
            if (check > 0.0) {
                perc -= check;
                s.uzfwc += check;
            }

            // Interflow (before this increment's inflow is added).
            const double del = s.uzfwc * duz;
            sif += del;
            s.uzfwc -= del;

            // Distribute percolation: tension water first except the pfree share.
            const double perct = perc * (1.0 - p.pfree);
            double percf = 0.0;
            if (perct + s.lztwc > p.lztwm) {
                percf = perct + s.lztwc - p.lztwm;
                s.lztwc = p.lztwm;
            } else {
                s.lztwc += perct;
            }
            percf += perc * p.pfree;
            if (percf > 0.0) {
                const double hpl = p.lzfpm / (p.lzfpm + p.lzfsm);
                const double ratlp = s.lzfpc / p.lzfpm;
                const double ratls = s.lzfsc / p.lzfsm;
                const double denom = (1.0 - ratlp) + (1.0 - ratls);
                double fracp = denom > 0.0 ? hpl * 2.0 * (1.0 - ratlp) / denom : hpl;
                fracp = std::clamp(fracp, 0.0, 1.0);
                double percs = percf * (1.0 - fracp);
                s.lzfsc += percs;
                if (s.lzfsc > p.lzfsm) {
                    percs -= s.lzfsc - p.lzfsm;
                    s.lzfsc = p.lzfsm;
                }
                s.lzfpc += percf - percs;
                if (s.lzfpc > p.lzfpm) {
                    double excess = s.lzfpc - p.lzfpm;
                    s.lzfpc = p.lzfpm;
                    // Excess goes to tension water, then to any supplemental room.
                    const double to_tension = std::min(excess, std::max(p.lztwm - s.lztwc, 0.0));
                    s.lztwc += to_tension;
                    excess -= to_tension;
                    const double to_supp = std::min(excess, std::max(p.lzfsm - s.lzfsc, 0.0));
                    s.lzfsc += to_supp;
                    excess -= to_supp;
                    s.lztwc += excess;  // only reachable through rounding
                }
            }

            // Surface runoff when upper zone free water overflows.
            if (pinc > 0.0) {
                if (pinc + s.uzfwc > p.uzfwm) {
                    const double sur = pinc + s.uzfwc - p.uzfwm;
                    s.uzfwc = p.uzfwm;
                    ssur += sur * parea;
                    adsur = sur * (1.0 - addro / pinc);
                    ssur += adsur * p.adimp;
                } else {
                    s.uzfwc += pinc;
                }
            }
        }

        // ADIMP area water balance.
        s.adimc += pinc - addro - adsur;
        const double adimc_cap = p.uztwm + p.lztwm;
        if (s.adimc > adimc_cap) {
            addro += s.adimc - adimc_cap;
            s.adimc = adimc_cap;
        }
        sdro += addro * p.adimp;
    }

    // --- Area weighting -----------------------------------------------------
    const double eused = (e1 + e2 + e3) * parea;
    sif *= parea;
    const double tbf = sbf * parea;
    const double bfcc = tbf / (1.0 + p.side);
    const double bfp = spbf * parea / (1.0 + p.side);
    const double bfncc = tbf - bfcc;

    auto& c = out.components;
    c.impervious = roimp;
    c.direct = sdro;
    c.surface = ssur;
    c.interflow = sif;
    c.baseflow = bfcc;
    c.primary_baseflow = bfp;
    c.supplemental_baseflow = std::max(bfcc - bfp, 0.0);

    auto& f = out.fluxes;
    f.intensity = roimp + ssur;
    f.wetness = sdro + sif;
    f.slow = bfcc;
    f.total = f.intensity + f.wetness + f.slow;
    f.aet = eused + e5 * p.adimp;
    f.deep_loss = bfncc;

    out.state = s;
    return out;
}

}  // namespace mwh
