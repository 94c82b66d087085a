// Command-line front end: trade-off curves, packet-level simulation, rate
// bounds, and the internal validation suite.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 validation failure,
// 4 infeasible design, 1 unexpected internal error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "cachesim/common.hpp"
#include "cachesim/config.hpp"
#include "cachesim/experiments.hpp"
#include "cachesim/validation.hpp"
#include "cachesim/version.hpp"

namespace {

struct CommandOptions {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int threads = 0;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_run_options(CLI::App* cmd, CommandOptions& opts) {
    cmd->add_option("--config", opts.config_path,
                    "JSON experiment configuration file")
        ->required();
    opts.out_opt = cmd->add_option(
        "--out", opts.out_path,
        "CSV output path; overrides the config, '-' writes to stdout");
    opts.seed_opt =
        cmd->add_option("--seed", opts.seed, "master seed; overrides the config");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (default: CACHESIM_THREADS or 1)")
        ->check(CLI::PositiveNumber);
}

using Runner = cachesim::RunOutput (*)(const cachesim::ExperimentConfig&, int);

int run_command(const CommandOptions& opts, Runner runner) {
    cachesim::ExperimentConfig config =
        cachesim::parse_config(cachesim::read_text_file(opts.config_path));
    if (opts.seed_opt->count() > 0) config.sim.seed = opts.seed;
    if (opts.out_opt->count() > 0) {
        config.csv_path = opts.out_path == "-" ? std::string{} : opts.out_path;
    }
    cachesim::RunOutput output =
        runner(config, cachesim::resolve_threads(opts.threads));
    cachesim::write_output(config, output);
    return 0;
}

int run_validate(std::uint64_t seed) {
    std::vector<cachesim::CheckResult> results =
        cachesim::run_validation_suite(seed);
    for (const cachesim::CheckResult& r : results) {
        std::printf("%-36s %s  %s\n", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.detail.c_str());
    }
    return cachesim::all_passed(results) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("cachesim ") + cachesim::kVersion +
                 " — lossy coded-caching trade-off toolkit"};
    app.require_subcommand(1);

    CommandOptions lcu_opts, ccm_opts, sim_opts, bounds_opts;
    CLI::App* lcu_cmd = app.add_subcommand(
        "lcu-curve", "Distortion curve of the local-cache unicast baseline");
    add_run_options(lcu_cmd, lcu_opts);
    CLI::App* ccm_cmd = app.add_subcommand(
        "ccm-curve", "Distortion curve of the cache-aided coded multicast scheme");
    add_run_options(ccm_cmd, ccm_opts);
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Packet-level delivery simulation of the coded scheme");
    add_run_options(sim_cmd, sim_opts);
    CLI::App* bounds_cmd = app.add_subcommand(
        "bounds", "Closed-form delivery-rate bounds for a cache design");
    add_run_options(bounds_cmd, bounds_opts);

    std::uint64_t validate_seed = 1;
    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Cross-check solvers and bounds against internal oracles");
    validate_cmd->add_option("--seed", validate_seed, "suite seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (lcu_cmd->parsed()) return run_command(lcu_opts, cachesim::run_lcu_curve);
        if (ccm_cmd->parsed()) return run_command(ccm_opts, cachesim::run_ccm_curve);
        if (sim_cmd->parsed()) return run_command(sim_opts, cachesim::run_simulate);
        if (bounds_cmd->parsed())
            return run_command(bounds_opts, cachesim::run_bounds);
        if (validate_cmd->parsed()) return run_validate(validate_seed);
    } catch (const cachesim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cachesim::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
