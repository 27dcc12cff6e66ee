// mwh: metric sensitivity, model ensembles, sufficiency checks and flux maps.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mwh/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> sets;  // raw key=value
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value config file (flags override it)");
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            name, [&f, key](const std::string& v) { f.overrides.emplace_back(key, v); }, help);
    };
    flag("--input", "input", "CSV with date, precip_mm, pet_mm and flow_mm columns");
    flag("--model", "model", "simhyd | sacramento (default simhyd)");
    flag("--metric", "metrics", "comma list of nse, kgess, wia (default all)");
    flag("--size", "size", "ensemble size (default 1000000)");
    flag("--seed", "seed", "master seed (default 1)");
    flag("--warmup", "warmup", "warm-up days excluded from evaluation (default 365)");
    flag("--delta", "deltas", "comma list of acceptability deltas (default 0.05,0.1)");
    flag("--threads", "threads", "worker threads; outputs do not depend on it (default 1)");
    flag("--out", "out", "output directory (default .)");
    flag("--repeats", "repeats", "SCE repeats per metric (default 10)");
    flag("--batch-size", "batch_size", "ensemble rows per streamed batch (default 10000)");
    flag("--max-evals", "sce.max_evals", "SCE evaluation budget per repeat (default 50000)");
    flag("--sets", "sets", "parameter-set CSV to use instead of LHS sampling");
    flag("--ensemble", "ensemble", "existing ensemble.csv (fluxmap, sufficiency)");
    cmd->add_option("--set", f.sets, "any config setting as key=value (repeatable)");
}

mwh::RunConfig build_config(const Flags& f) {
    mwh::RunConfig c;
    if (!f.config.empty()) mwh::load_config(c, f.config);
    for (const auto& [k, v] : f.overrides) mwh::apply_setting(c, k, v);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw mwh::ConfigError("--set expects key=value, got '" + kv + "'");
        mwh::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
}

void report(const mwh::cli::CommandResult& r) {
    for (const auto& v : r.verdicts)
        std::cout << to_string(v.metric) << ": ensemble_hmv=" << mwh::csv::format_double(v.ensemble_hmv)
                  << " sce_hmv=" << mwh::csv::format_double(v.sce_hmv)
                  << (v.sufficient ? " sufficient" : " insufficient")
                  << (v.sufficient ? "" : " (" + std::string(to_string(v.inadequate_side)) + ")")
                  << '\n';
    for (const auto& [m, reps] : r.sce)
        std::cout << "sce " << to_string(m) << ": best=" << mwh::csv::format_double(reps.sce_hmv) << '\n';
    for (const auto& f : r.filters)
        std::cout << "filter " << to_string(f.metric) << " delta=" << mwh::csv::format_double(f.delta)
                  << ": " << f.accepted << " accepted\n";
    for (const auto& file : r.files) std::cout << "wrote " << file << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metric sensitivity and flux-map experiments for daily rainfall-runoff models"};
    app.require_subcommand(1);

    using Command = mwh::cli::CommandResult (*)(const mwh::RunConfig&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"sensitivity", "degrade an observed series and score it (degradation.csv, residuals.csv, step20.csv)",
         &mwh::cli::cmd_sensitivity},
        {"simulate", "run one parameter set (param.<name> settings) and write simulation.csv",
         &mwh::cli::cmd_simulate},
        {"ensemble", "LHS ensemble, SCE repeats, sufficiency verdicts and flux maps",
         &mwh::cli::cmd_ensemble},
        {"calibrate", "SCE repeats only (sce_<metric>.json)", &mwh::cli::cmd_calibrate},
        {"fluxmap", "re-filter an existing ensemble file into flux maps", &mwh::cli::cmd_fluxmap},
        {"sufficiency", "recompute sufficiency verdicts for an ensemble file",
         &mwh::cli::cmd_sufficiency},
    };

    std::map<std::string, Flags> flags;
    std::map<CLI::App*, std::pair<std::string, Command>> subs;
    for (const auto& [name, help, fn] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, flags[name]);
        subs[cmd] = {name, fn};
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (auto& [cmd, entry] : subs) {
            if (!cmd->parsed()) continue;
            const auto config = build_config(flags[entry.first]);
            report(entry.second(config));
        }
    } catch (const mwh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mwh::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
