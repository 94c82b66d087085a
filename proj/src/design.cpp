#include "cachesim/design.hpp"

#include <cmath>
#include <string>

namespace cachesim {

void CacheDesign::validate() const {
    const std::size_t K = cache_size.size();
    if (storing_range.size() != K || cache_split.size() != K) {
        throw config_error("design: storing_range/cache_split must have one row per receiver");
    }
    const std::size_t N = storing_range.empty() ? 0 : storing_range[0].size();
    if (N == 0) throw config_error("design: at least one file required");
    for (std::size_t k = 0; k < K; ++k) {
        if (storing_range[k].size() != N || cache_split[k].size() != N) {
            throw config_error("design: ragged rows (receiver " + std::to_string(k) + ")");
        }
        if (cache_size[k] < 0.0 || !std::isfinite(cache_size[k])) {
            throw config_error("design: cache size of receiver " +
                               std::to_string(k) + " must be finite and >= 0");
        }
        double split_total = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double range = storing_range[k][n];
            double split = cache_split[k][n];
            if (range < 0.0 || !std::isfinite(range)) {
                throw config_error("design: negative storing range at receiver " +
                                   std::to_string(k) + ", file " + std::to_string(n));
            }
            if (split < 0.0 || !std::isfinite(split)) {
                throw config_error("design: negative cache split at receiver " +
                                   std::to_string(k) + ", file " + std::to_string(n));
            }
            split_total += split;
            if (split * cache_size[k] > range + 1e-9) {
                throw config_error(
                    "design: receiver " + std::to_string(k) + " caches more of file " +
                    std::to_string(n) + " than its storing range admits");
            }
        }
        if (split_total > 1.0 + 1e-9) {
            throw config_error("design: cache split of receiver " +
                               std::to_string(k) + " sums above 1");
        }
    }
}

CacheDesign receiver_symmetric_design(const std::vector<double>& range_per_file,
                                      const std::vector<double>& split_per_file,
                                      double cache_size, int num_receivers) {
    CacheDesign design;
    design.storing_range.assign(static_cast<std::size_t>(num_receivers), range_per_file);
    design.cache_split.assign(static_cast<std::size_t>(num_receivers), split_per_file);
    design.cache_size.assign(static_cast<std::size_t>(num_receivers), cache_size);
    design.validate();
    return design;
}

CacheDesign file_symmetric_design(const std::vector<double>& range_per_receiver,
                                  const std::vector<double>& split_per_receiver,
                                  const std::vector<double>& cache_sizes,
                                  int num_files) {
    const std::size_t K = cache_sizes.size();
    if (range_per_receiver.size() != K || split_per_receiver.size() != K) {
        throw config_error("design: per-receiver vectors must share one length");
    }
    CacheDesign design;
    design.cache_size = cache_sizes;
    design.storing_range.resize(K);
    design.cache_split.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        design.storing_range[k].assign(static_cast<std::size_t>(num_files),
                                       range_per_receiver[k]);
        design.cache_split[k].assign(static_cast<std::size_t>(num_files),
                                     split_per_receiver[k]);
    }
    design.validate();
    return design;
}

}  // namespace cachesim
