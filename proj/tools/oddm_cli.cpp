// SPDX-License-Identifier: Apache-2.0
//
// oddm: experiment harness for wideband ODDM channel characterization.
//
//   oddm impulse      --scenario type2 --out impulse.csv
//   oddm nmse-sweep   --scenario type1 -N 64 -M 1024 --vmax 250,750 --realizations 100
//   oddm oracle-check --seed 7
//   oddm gen-channel  --scenario type2 --vmax 5 --seed 3
//
// Exit codes: 0 success, 1 usage error, 2 infeasible configuration,
// 3 oracle-check failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "oddm/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInfeasible = 2, kOracleFailed = 3 };

struct Flags {
    std::optional<std::string> scenario;
    std::optional<std::string> config;
    std::optional<int> M;
    std::optional<int> N;
    std::optional<std::vector<double>> vmax;
    std::optional<int> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<double> delay_spread_ns;
    std::optional<int> Q;
    std::optional<std::string> dse;
    std::optional<std::string> out;
    std::optional<std::string> baseline_sync;
    std::optional<int> threads;
    bool corrupt_kernel = false;
};

oddm::ScenarioConfig resolve(const Flags& f, const std::string& command) {
    nlohmann::json file;
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in) throw std::runtime_error("cannot open config file " + *f.config);
        file = nlohmann::json::parse(in);
    }
    std::string scenario = "type2";
    if (file.contains("scenario")) scenario = file.at("scenario").get<std::string>();
    if (f.scenario) scenario = *f.scenario;

    auto cfg = oddm::default_config(oddm::scenario_from_string(scenario));
    if (command == "oracle-check") {
        cfg.frame.M = 64;
        cfg.frame.N = 16;
        cfg.frame.Q = 4;
    }
    oddm::apply_json(cfg, file);

    // flags mirror the JSON keys and take precedence
    nlohmann::json overrides;
    if (f.M) overrides["M"] = *f.M;
    if (f.N) overrides["N"] = *f.N;
    if (f.vmax) overrides["vmax"] = *f.vmax;
    if (f.realizations) overrides["realizations"] = *f.realizations;
    if (f.seed) overrides["seed"] = *f.seed;
    if (f.delay_spread_ns) overrides["delay_spread_ns"] = *f.delay_spread_ns;
    if (f.Q) overrides["Q"] = *f.Q;
    if (f.dse) overrides["dse"] = *f.dse;
    if (f.out) overrides["out"] = *f.out;
    if (f.baseline_sync) overrides["baseline_sync"] = *f.baseline_sync;
    if (f.threads) overrides["threads"] = *f.threads;
    oddm::apply_json(cfg, overrides);
    if (f.M || f.N) cfg.nm_grid = {{cfg.frame.N, cfg.frame.M}};
    return cfg;
}

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    write(out);
}

int run(const std::string& command, const Flags& flags) {
    const auto cfg = resolve(flags, command);

    if (command == "impulse") {
        const auto result = oddm::run_impulse(cfg);
        emit(cfg.out, [&](std::ostream& os) { oddm::write_impulse_csv(result, os); });
        return kOk;
    }
    if (command == "nmse-sweep") {
        const auto rows = oddm::run_nmse_sweep(cfg);
        for (const auto& r : rows) {
            if (r.rejected > 0) {
                std::cerr << "N=" << r.N << " M=" << r.M << " v_max=" << r.v_max_si << " m/s: " << r.rejected
                          << " UWA draws rejected (l'_max >= M)\n";
            }
        }
        emit(cfg.out, [&](std::ostream& os) { oddm::write_sweep_csv(rows, os); });
        return kOk;
    }
    if (command == "oracle-check") {
        const auto rep = oddm::run_oracle_check(cfg, {.corrupt_kernel = flags.corrupt_kernel});
        emit(cfg.out, [&](std::ostream& os) { os << rep.to_json().dump(2) << '\n'; });
        return rep.passed() ? kOk : kOracleFailed;
    }
    if (command == "gen-channel") {
        if (cfg.vmax.empty()) throw oddm::ConfigError("gen-channel needs a --vmax value");
        int rejected = 0;
        const auto ch = oddm::draw_channel(cfg, cfg.frame, oddm::vmax_to_si(cfg.scenario, cfg.vmax.back()),
                                           cfg.seed, &rejected);
        emit(cfg.out, [&](std::ostream& os) { os << oddm::to_json(ch).dump(2) << '\n'; });
        return kOk;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wideband ODDM channel characterization experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--scenario", f.scenario, "type1 (RF, TDL-C) or type2 (underwater acoustic)")
        ->check(CLI::IsMember({"type1", "type2"}));
    app.add_option("--config", f.config, "JSON config file; flags override its values");
    app.add_option("-M", f.M, "multicarrier symbols per frame");
    app.add_option("-N", f.N, "subcarriers per symbol");
    app.add_option("--vmax", f.vmax, "maximum speeds, km/h (type1) or knots (type2)")->delimiter(',');
    app.add_option("--realizations", f.realizations, "Monte Carlo realizations per sweep point");
    app.add_option("--seed", f.seed, "master seed");
    app.add_option("--delay-spread-ns", f.delay_spread_ns, "TDL-C RMS delay spread (type1)");
    app.add_option("--q", f.Q, "pulse half-length in samples");
    app.add_option("--dse", f.dse, "impulse maps to emit")->check(CLI::IsMember({"on", "off", "both"}));
    app.add_option("--out", f.out, "output path (stdout when omitted)");
    app.add_option("--baseline-sync", f.baseline_sync, "keep or drop the squint sync offset in the baseline")
        ->check(CLI::IsMember({"keep", "drop"}));
    app.add_option("--threads", f.threads, "worker threads for sweeps (0: all cores)");

    auto* impulse = app.add_subcommand("impulse", "DD response to a single-pulse frame, squint on/off");
    auto* sweep = app.add_subcommand("nmse-sweep", "NMSE of the squint-ignorant channel matrix vs v_max");
    auto* oracle = app.add_subcommand("oracle-check", "cross-check the characterization against direct simulation");
    auto* gen = app.add_subcommand("gen-channel", "dump one channel realization as JSON");
    oracle->add_flag("--corrupt-kernel", f.corrupt_kernel, "test hook: perturb one kernel value")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    std::string command;
    for (auto* sub : {impulse, sweep, oracle, gen})
        if (sub->parsed()) command = sub->get_name();

    try {
        return run(command, f);
    } catch (const oddm::TapRangeError& e) {
        std::cerr << "infeasible configuration: " << e.what() << '\n';
        return kInfeasible;
    } catch (const oddm::ConfigError& e) {
        std::cerr << "infeasible configuration: " << e.what() << '\n';
        return kInfeasible;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
