#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "mwh/cli.hpp"
#include "support/synthetic.hpp"

using namespace mwh;
using namespace mwh::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MWH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig config_from(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    parse_config(c, in);
    return c;
}

fs::path perfect_model_input(const fs::path& dir, std::size_t days = 3 * 365) {
    const auto f = synthetic_forcing(days, 2024);
    const std::vector<double> theta{2.5, 180.0, 2.0, 300.0, 0.4, 0.2, 0.05};
    const auto flow = full_flow(ModelId::Simhyd, theta, f);
    write_input(dir / "input.csv", f, &flow);
    return dir / "input.csv";
}

std::size_t data_rows(const fs::path& p) {
    const auto t = csv::read(p.string());
    return t.rows.size();
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndOverrides) {
    auto c = config_from(R"(
        # experiment
        model = sacramento
        metrics = kgess, nse
        size = 500          # small
        seed = 7
        deltas = 0.05,0.1,0.2
        range.uzk = 0.2,0.5
        sce.max_evals = 1234
        sce_hmv.kgess = 0.8
    )");
    EXPECT_EQ(c.model, ModelId::Sacramento);
    ASSERT_EQ(c.metrics.size(), 2u);
    EXPECT_EQ(c.metrics[0], MetricId::Kgess);
    EXPECT_EQ(c.size, 500u);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.deltas.size(), 3u);
    EXPECT_EQ(c.space()[c.space().index_of("uzk")].lower, 0.2);
    EXPECT_EQ(c.sce_config().max_evals, 1234);
    EXPECT_EQ(c.sce_config().n_complexes, 6);
    EXPECT_EQ(c.sce_config().seed, 7u);
    EXPECT_EQ(c.sce_hmv.at(MetricId::Kgess), 0.8);
    apply_setting(c, "model", "simhyd");
    EXPECT_EQ(c.sce_config().n_complexes, 4);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(config_from("colour = red"), ConfigError);
    EXPECT_THROW(config_from("size = 0"), ConfigError);
    EXPECT_THROW(config_from("size = many"), ConfigError);
    EXPECT_THROW(config_from("metrics = rmse"), ConfigError);
    EXPECT_THROW(config_from("range.k = 0.5,0.1"), ConfigError);
    EXPECT_THROW(config_from("just a line"), ConfigError);
    EXPECT_THROW(config_from("range.nothing = 0,1").space(), ConfigError);
    auto c = config_from("deltas = 0.1,-0.1");
    EXPECT_THROW(c.validate(), ConfigError);
    c = config_from("input = /no/such/file.csv");
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, ParameterValuesAndInitialState) {
    auto c = config_from("param.insc = 2\nparam.coeff = 200\nparam.sq = 1\n");
    EXPECT_THROW(c.parameter_values(), ConfigError);
    c = config_from(
        "param.insc=2\nparam.coeff=200\nparam.sq=1\nparam.smsc=250\nparam.sub=0.3\nparam.crak=0.3\n"
        "param.k=0.1\ninit.sms=20\n");
    EXPECT_EQ(c.parameter_values().size(), 7u);
    const auto s = c.initial_state();
    ASSERT_TRUE(s);
    EXPECT_EQ(std::get<SimhydState>(*s).sms, 20.0);
    c.init["uztwc"] = 1.0;
    EXPECT_THROW(c.initial_state(), ConfigError);
}

TEST(Sensitivity, ShapesStepTwentyTableAndReplay) {
    const auto dir = scratch_dir("cli_sens");
    {
        std::ofstream out(dir / "obs.csv");
        write_series(out, flashy45(), "flow_mm");
    }
    RunConfig c;
    c.input = (dir / "obs.csv").string();
    c.out = (dir / "a").string();
    cli::cmd_sensitivity(c);
    EXPECT_EQ(data_rows(dir / "a" / "degradation.csv"), 9u * 21u);
    EXPECT_EQ(data_rows(dir / "a" / "residuals.csv"), 3u * 21u * 45u);
    const auto t = csv::read((dir / "a" / "step20.csv").string());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.comments.front(), "seed=1");
    const auto nse_col = t.column("nse");
    for (const auto& row : t.rows) {
        const double v = *csv::to_double(row[nse_col]);
        if (row[0] == "variability") {
            EXPECT_NEAR(v, 0.0, 1e-12);
        } else if (row[0] == "correlation") {
            EXPECT_NEAR(v, -1.0, 1e-12);
        }
    }
    c.out = (dir / "b").string();
    cli::cmd_sensitivity(c);
    for (const char* f : {"degradation.csv", "residuals.csv", "step20.csv"})
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

TEST(Simulate, ZeroForcingGivesZeroFlow) {
    const auto dir = scratch_dir("cli_sim_zero");
    const Forcing f(Series(kDefaultStartDate, std::vector<double>(400, 0.0)),
                    Series(kDefaultStartDate, std::vector<double>(400, 0.0)));
    write_input(dir / "in.csv", f);
    auto c = config_from(
        "param.insc=2\nparam.coeff=200\nparam.sq=1\nparam.smsc=250\nparam.sub=0.3\nparam.crak=0.3\n"
        "param.k=0.1\n");
    c.input = (dir / "in.csv").string();
    c.out = dir.string();
    cli::cmd_simulate(c);
    const auto t = csv::read((dir / "simulation.csv").string());
    ASSERT_EQ(t.rows.size(), 35u);
    for (const auto& row : t.rows) EXPECT_EQ(*csv::to_double(row[t.column("flow_mm")]), 0.0);
}

TEST(Simulate, FlowEqualsFluxSumAndFooterBalances) {
    const auto dir = scratch_dir("cli_sim");
    write_input(dir / "in.csv", synthetic_forcing(3653, 5));
    for (const auto* model : {"simhyd", "sacramento"}) {
        RunConfig c;
        apply_setting(c, "model", model);
        const auto space = default_space(c.model);
        for (const auto& d : space.dims())
            c.params[d.name] = 0.5 * (d.lower + d.upper);
        c.input = (dir / "in.csv").string();
        c.out = (dir / model).string();
        c.warmup = 0;
        cli::cmd_simulate(c);
        const auto t = csv::read((dir / model / "simulation.csv").string());
        ASSERT_EQ(t.rows.size(), 3653u);
        double precip = 0;
        for (const auto& row : t.rows) {
            const double q = *csv::to_double(row[t.column("flow_mm")]);
            const double s = *csv::to_double(row[t.column("intensity_mm")]) +
                             *csv::to_double(row[t.column("wetness_mm")]) +
                             *csv::to_double(row[t.column("slow_mm")]);
            EXPECT_NEAR(q, s, 1e-12 * (1 + q));
            precip += *csv::to_double(row[t.column("precip_mm")]);
        }
        std::string footer;
        for (const auto& cm : t.comments)
            if (cm.rfind("mass_balance", 0) == 0) footer = cm;
        ASSERT_FALSE(footer.empty());
        const auto pos = footer.find("residual=");
        const double residual = *csv::to_double(footer.substr(pos + 9));
        EXPECT_LE(std::abs(residual), 1e-6 * precip) << model;
        for (const auto& st : store_names(c.model)) EXPECT_NO_THROW(t.column(st));
    }
}

TEST(Ensemble, OutputsVerdictsFluxMapsAndThreadIndependence) {
    const auto dir = scratch_dir("cli_ens");
    const auto input = perfect_model_input(dir);
    auto base = config_from("size = 400\nrepeats = 2\nsce.max_evals = 1500\ndeltas = 0.05,0.1\nbatch_size = 64\n");
    base.input = input.string();

    auto c1 = base;
    c1.out = (dir / "t1").string();
    c1.threads = 1;
    const auto r1 = cli::cmd_ensemble(c1);
    auto c3 = base;
    c3.out = (dir / "t3").string();
    c3.threads = 3;
    cli::cmd_ensemble(c3);

    ASSERT_EQ(r1.verdicts.size(), 3u);
    ASSERT_EQ(r1.filters.size(), 6u);
    std::size_t fluxmaps = 0;
    for (const auto& e : fs::directory_iterator(dir / "t1")) {
        const auto name = e.path().filename().string();
        if (name.rfind("fluxmap_", 0) == 0) ++fluxmaps;
        EXPECT_EQ(slurp(e.path()), slurp(dir / "t3" / name)) << name;
    }
    EXPECT_EQ(fluxmaps, 6u);
    EXPECT_EQ(data_rows(dir / "t1" / "ensemble.csv"), 400u);
    EXPECT_EQ(data_rows(dir / "t1" / "parameter_sets.csv"), 400u);

    // Strict filter point sets are subsets of the relaxed ones.
    for (auto m : kAllMetrics) {
        const std::string name(to_string(m));
        const auto strict = import_fluxmap((dir / "t1" / ("fluxmap_" + name + "_0.05.csv")).string());
        const auto relaxed = import_fluxmap((dir / "t1" / ("fluxmap_" + name + "_0.1.csv")).string());
        std::set<long long> ids;
        for (const auto& p : relaxed.points) ids.insert(p.run_id);
        for (const auto& p : strict.points) EXPECT_TRUE(ids.count(p.run_id)) << name;
        EXPECT_EQ(relaxed.header.ensemble_size, 400u);
    }

    // Re-filter and recompute verdicts from the files alone.
    auto c = base;
    c.ensemble = (dir / "t1" / "ensemble.csv").string();
    c.out = (dir / "refilter").string();
    const auto rf = cli::cmd_fluxmap(c);
    EXPECT_EQ(rf.filters.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(rf.filters[i].accepted, r1.filters[i].accepted);
    const auto rs = cli::cmd_sufficiency(c);
    ASSERT_EQ(rs.verdicts.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(rs.verdicts[i].sufficient, r1.verdicts[i].sufficient);
        EXPECT_EQ(rs.verdicts[i].hmv, r1.verdicts[i].hmv);
    }
}

TEST(Ensemble, UsesSuppliedParameterSets) {
    const auto dir = scratch_dir("cli_sets");
    const auto input = perfect_model_input(dir);
    const auto space = SimhydParams::default_space();
    {
        std::ofstream out(dir / "sets.csv");
        std::vector<ParameterSet> sets{{2.5, 180.0, 2.0, 300.0, 0.4, 0.2, 0.05}, {1, 100, 1, 100, 0.1, 0.1, 0.1}};
        write_parameter_sets(out, space, sets, 100);
    }
    auto c = config_from("repeats = 1\nsce.max_evals = 300\nmetrics = kgess\ndeltas = 0.5\n");
    c.input = input.string();
    c.sets = (dir / "sets.csv").string();
    c.out = (dir / "out").string();
    const auto r = cli::cmd_ensemble(c);
    const auto file = read_ensemble((dir / "out" / "ensemble.csv").string());
    ASSERT_EQ(file.records.size(), 2u);
    EXPECT_EQ(file.records[0].run_id, 100);
    EXPECT_NEAR(*file.records[0].value(MetricId::Kgess), 1.0, 1e-9);
    EXPECT_FALSE(fs::exists(dir / "out" / "parameter_sets.csv"));
    EXPECT_EQ(r.verdicts[0].ensemble_hmv, *file.records[0].value(MetricId::Kgess));
}

TEST(Executable, ExitCodes) {
    const auto dir = scratch_dir("cli_exit");
    {
        std::ofstream out(dir / "obs.csv");
        write_series(out, flashy45(), "flow_mm");
        std::ofstream bad(dir / "bad.csv");
        bad << "date,flow_mm\n2000-01-01,1\n2000-01-03,2\n";
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "colour = red\n";
    }
    const auto d = dir.string();
    EXPECT_EQ(run_cli("sensitivity --input " + d + "/obs.csv --out " + d + "/o"), 0);
    EXPECT_TRUE(fs::exists(dir / "o" / "degradation.csv"));
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("sensitivity --bogus"), 2);
    EXPECT_EQ(run_cli("sensitivity --config " + d + "/bad.cfg"), 2);
    EXPECT_EQ(run_cli("sensitivity --config " + d + "/missing.cfg"), 2);
    EXPECT_EQ(run_cli("sensitivity --input " + d + "/missing.csv"), 2);
    EXPECT_EQ(run_cli("sensitivity --input " + d + "/bad.csv --out " + d + "/o2"), 3);
    // A constant series has no variance to corrupt.
    {
        std::ofstream flat(dir / "flat.csv");
        flat << "date,flow_mm\n2000-01-01,1\n2000-01-02,1\n2000-01-03,1\n";
    }
    EXPECT_EQ(run_cli("sensitivity --input " + d + "/flat.csv --out " + d + "/o3"), 4);
}

TEST(Executable, SimulateThroughFlags) {
    const auto dir = scratch_dir("cli_exe_sim");
    write_input(dir / "in.csv", synthetic_forcing(500, 9));
    const auto d = dir.string();
    std::string args = "simulate --input " + d + "/in.csv --out " + d + "/o --warmup 30";
    for (const char* kv : {"param.insc=2", "param.coeff=200", "param.sq=1", "param.smsc=250",
                           "param.sub=0.3", "param.crak=0.3", "param.k=0.1"})
        args += std::string(" --set ") + kv;
    EXPECT_EQ(run_cli(args), 0);
    EXPECT_EQ(data_rows(dir / "o" / "simulation.csv"), 470u);
}
