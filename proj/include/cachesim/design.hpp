#pragma once

#include <vector>

#include "cachesim/common.hpp"

namespace cachesim {

/// A random fractional caching design: which prefix of each file a receiver
/// may cache from (and is guaranteed to receive via coded delivery), and how
/// its cache budget is split across files.
struct CacheDesign {
    /// storing_range[k][n]: prefix rate (bits/sample) of file n that
    /// receiver k caches from and that coded delivery completes on request.
    std::vector<std::vector<double>> storing_range;
    /// cache_split[k][n]: fraction of receiver k's cache devoted to file n.
    std::vector<std::vector<double>> cache_split;
    /// cache_size[k]: receiver k's cache budget (bits/sample).
    std::vector<double> cache_size;

    int num_receivers() const { return static_cast<int>(cache_size.size()); }
    int num_files() const {
        return storing_range.empty() ? 0 : static_cast<int>(storing_range[0].size());
    }

    /// Bits per sample of file n cached by receiver k:
    /// cache_split[k][n] * cache_size[k].
    double cached_bits(int k, int n) const {
        return cache_split[k][n] * cache_size[k];
    }

    /// Probability that one packet inside the storing range is cached:
    /// cached_bits / storing_range, and 0 when the range is empty.
    double cache_prob(int k, int n) const {
        double range = storing_range[k][n];
        if (range <= 0.0) return 0.0;
        double p = cached_bits(k, n) / range;
        return p < 1.0 ? p : 1.0;
    }

    /// Throws config_error on shape mismatches, negative entries, a
    /// receiver's split fractions summing above 1, or cached bits exceeding
    /// the storing range.  Split sums below 1 are allowed (idle cache is
    /// wasteful but evaluable); every shipped optimizer emits sums of 1.
    void validate() const;
};

/// All receivers share per-file ranges and splits and one cache size.
CacheDesign receiver_symmetric_design(const std::vector<double>& range_per_file,
                                      const std::vector<double>& split_per_file,
                                      double cache_size, int num_receivers);

/// Every file looks the same to a given receiver: per-receiver range/split
/// scalars replicated across num_files files.
CacheDesign file_symmetric_design(const std::vector<double>& range_per_receiver,
                                  const std::vector<double>& split_per_receiver,
                                  const std::vector<double>& cache_sizes,
                                  int num_files);

}  // namespace cachesim
