#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cachesim/config.hpp"
#include "cachesim/model.hpp"

namespace cachesim {

/// One row of a trade-off curve CSV.
struct ResultRow {
    std::string scheme;
    double cache_size = 0.0;
    double rate_budget = 0.0;
    double expected_distortion = 0.0;
    double coded_rate = 0.0;
    double uncoded_rate = 0.0;
    bool has_design = false;  // two-group diagnostics present
    int n_top = 0;
    double r1 = 0.0;
    double r2 = 0.0;
    std::uint64_t seed = 0;
};

/// Header shared by both curve subcommands.
std::string curve_csv_header();

/// Serializes curve rows under the fixed column order
/// scheme,M,R,expected_distortion,coded_rate,uncoded_rate,N_tilde,R1,R2,seed.
std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Output of one subcommand run: the CSV body and a JSON metadata document
/// (tool version, config hash, seeds, wall-clock timestamp).
struct RunOutput {
    std::string csv;
    std::string metadata_json;
};

/// Number of worker threads: --threads flag if given, else the
/// CACHESIM_THREADS environment variable, else 1.
int resolve_threads(int cli_threads);

/// Runs `work(i)` for i in [0, count) on `threads` workers.  Results must be
/// written into per-index slots by the caller; the schedule never affects
/// output ordering.
void parallel_for(long count, int threads,
                  const std::function<void(long)>& work);

RunOutput run_lcu_curve(const ExperimentConfig& config, int threads);
RunOutput run_ccm_curve(const ExperimentConfig& config, int threads);
RunOutput run_simulate(const ExperimentConfig& config, int threads);
RunOutput run_bounds(const ExperimentConfig& config, int threads);

/// Writes csv to config.csv_path (stdout when empty) and the metadata JSON
/// next to it.
void write_output(const ExperimentConfig& config, const RunOutput& output);

/// FNV-1a hash of the raw config text, reported in metadata.
std::string config_hash_hex(const std::string& config_text);

}  // namespace cachesim
