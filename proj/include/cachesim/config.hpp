#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/model.hpp"

namespace cachesim {

/// How per-file variances are produced.
struct VarianceSpec {
    enum class Kind { kList, kConstant, kUniform } kind = Kind::kConstant;
    std::vector<double> values;  // kList
    double value = 1.0;          // kConstant
    double low = 0.0;            // kUniform
    double high = 1.0;           // kUniform
    std::uint64_t seed = 0;      // kUniform
};

/// Demand model: either a shared Zipf exponent, per-receiver exponents, or
/// an explicit shared pmf.
struct DemandSpec {
    enum class Kind { kZipf, kZipfPerReceiver, kPmf } kind = Kind::kZipf;
    double zipf_alpha = 0.0;
    std::vector<double> zipf_alphas;
    std::vector<double> pmf;
};

/// Explicit packet-level design for `simulate`/`bounds`, overriding the
/// solver-produced one.
struct DesignSpec {
    std::vector<std::vector<double>> storing_range;  // K x N
    std::vector<std::vector<double>> cache_split;    // K x N
    std::vector<double> cache_size;                  // K
};

/// Simulation block of the config.
struct SimSpec {
    long tau = 1000;
    long T = 1;
    int trials = 30;
    std::uint64_t seed = 0;
    bool random_demand = true;
    Demand fixed_demand;                // when !random_demand
    std::optional<DesignSpec> design;   // explicit design, else ccm-derived
};

/// Parsed experiment description.
struct ExperimentConfig {
    int receivers = 1;
    std::vector<double> cache_sizes;
    int files = 1;
    VarianceSpec variances;
    DemandSpec demand;
    std::vector<double> rate_budgets;
    SimSpec sim;
    std::string csv_path;       // empty: stdout
    std::string metadata_path;  // empty: alongside csv or stdout
    std::string raw_text;       // original JSON, hashed into metadata
};

/// Parses and validates a JSON experiment config.  Unknown keys are
/// rejected; every error message carries the `$.section.field` path of the
/// offending entry.  Throws config_error.
ExperimentConfig parse_config(const std::string& json_text);

/// Reads a file into a string; throws config_error when unreadable.
std::string read_text_file(const std::string& path);

/// Materializes the per-file variances (drawing the seeded uniform variant
/// when requested).
std::vector<double> realized_variances(const VarianceSpec& spec,
                                       int num_files);

/// Builds the network instance for one rate budget.
NetworkInstance build_instance(const ExperimentConfig& config,
                               double rate_budget);

/// Builds the explicit packet design from a DesignSpec.
CacheDesign build_design(const DesignSpec& spec);

}  // namespace cachesim
