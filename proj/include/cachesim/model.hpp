#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cachesim/common.hpp"

namespace cachesim {

/// One source in the library: a unit-variance-scaled Gaussian process
/// identified by its per-sample variance.  Rate-distortion behaviour under
/// squared error is fully determined by the variance.
struct SourceFile {
    double variance = 1.0;
};

/// One cache-equipped receiver: a memory budget (bits per source sample) and
/// a probability mass function over which file it will request.
struct Receiver {
    double cache_size = 0.0;
    std::vector<double> demand_pmf;
};

/// The full problem instance: N files, K receivers, one delivery budget.
struct NetworkInstance {
    std::vector<SourceFile> files;
    std::vector<Receiver> receivers;
    double rate_budget = 0.0;  // shared downlink budget R (bits/sample)

    int num_files() const { return static_cast<int>(files.size()); }
    int num_receivers() const { return static_cast<int>(receivers.size()); }

    /// Throws config_error unless every variance is positive, every cache
    /// size is non-negative, the rate budget is non-negative, and every
    /// demand pmf has num_files() non-negative entries summing to 1 within
    /// 1e-9.
    void validate() const;

    /// True when all receivers share one cache size and one demand pmf.
    bool symmetric_receivers() const;

    /// True when additionally the demand pmf is uniform and all file
    /// variances are equal (the fully symmetric setting).
    bool fully_symmetric() const;
};

/// A demand realization: demand[k] is the 0-based file index requested by
/// receiver k.
using Demand = std::vector<int>;

/// The two implemented delivery schemes.
enum class Scheme {
    kLcu,  // local-cache unicast baseline
    kCcm,  // cache-aided coded multicast
};
const char* scheme_name(Scheme scheme);

/// One point on a scheme's distortion / memory / rate trade-off curve.
struct TradeoffPoint {
    Scheme scheme = Scheme::kLcu;
    double cache_size = 0.0;
    double rate_budget = 0.0;
    double expected_distortion = 0.0;
    double coded_rate = 0.0;    // budget spent on coded multicasts
    double uncoded_rate = 0.0;  // budget spent on per-file uncoded layers
    // Solver diagnostics, populated for the coded scheme only.
    bool has_design_diagnostics = false;
    double n_top = 0.0;  // cut-off size of the cached file group
    double r1 = 0.0;     // coded rate for cached-group files
    double r2 = 0.0;     // coded rate for the remaining files
};

/// Squared-error distortion of an optimally coded Gaussian source of the
/// given variance at `rate` bits per sample: variance * 2^(-2 rate).
/// Throws std::invalid_argument for negative rate or non-positive variance.
double gaussian_distortion(double variance, double rate);

/// Effective description rate available to a receiver that holds `cached`
/// bits per sample and receives `delivered` more.  Gaussian sources are
/// successively refinable, so the layers add.
double effective_rate(double cached, double delivered);

/// Zipf popularity profile over n_files items: q_i proportional to
/// (i+1)^(-alpha) (0-based i).  alpha = 0 gives the uniform pmf.
std::vector<double> zipf_demand(int n_files, double alpha);

/// Draws one demand vector, each receiver sampling independently from its
/// own pmf via inverse-CDF; deterministic for a fixed seed.
Demand sample_demand(const NetworkInstance& instance, std::uint64_t seed);

/// Number of distinct demand vectors (N^K), saturating at `cap`.
double demand_space_size(const NetworkInstance& instance, double cap = 1e6);

/// Expected network distortion E[(1/K) sum_k variance_{d_k} 2^(-2 e_k)]
/// where e = effective_rates(d).  Enumerates the demand space exactly when
/// it has at most `exact_cap` points, otherwise averages `trials` Monte
/// Carlo draws seeded from `seed`.  Throws std::invalid_argument when a
/// Monte Carlo evaluation would run zero trials.
double expected_demand_distortion(
    const NetworkInstance& instance,
    const std::function<std::vector<double>(const Demand&)>& effective_rates,
    long trials, std::uint64_t seed, double exact_cap = 1e6);

}  // namespace cachesim
