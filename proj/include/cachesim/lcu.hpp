#pragma once

#include <cstdint>
#include <vector>

#include "cachesim/model.hpp"

namespace cachesim {

/// Cache contents chosen by the unicast baseline: allocations[k][n] is the
/// number of refinement bits per sample of file n stored by receiver k, and
/// water_levels[k] is the multiplier at which receiver k's marginal utility
/// 2 ln2 * q_{k,n} * variance_n * 2^(-2 allocations[k][n]) levels off.
struct LcuCacheAllocation {
    std::vector<std::vector<double>> allocations;
    std::vector<double> water_levels;
};

/// One receiver's row of the above.
struct LcuReceiverAllocation {
    std::vector<double> allocation;
    double water_level = 0.0;
};

/// Splits one receiver's cache across files to minimize its expected local
/// distortion sum q_{k,n} variance_n 2^(-2 M_{k,n}) subject to the cache
/// budget.  Reverse water-filling: M_{k,n} = max(0, 0.5 log2(2 ln2 *
/// q_{k,n} variance_n / lambda)) with lambda bisected until the budget
/// binds.  Throws std::invalid_argument when the cache size is negative or
/// every q_{k,n} * variance_n is zero (nothing to allocate toward).
LcuReceiverAllocation lcu_cache_allocation(const Receiver& receiver,
                                           const std::vector<SourceFile>& files);

/// All receivers' allocations assembled.
LcuCacheAllocation lcu_place(const NetworkInstance& instance);

/// Per-demand delivery split: rates[k] tops up receiver k's cached prefix of
/// its requested file, water_level is the common delivery multiplier.
struct LcuDeliveryRates {
    std::vector<double> rates;
    double water_level = 0.0;
};

/// Splits the delivery budget across receivers for one demand to minimize
/// (1/K) sum_k variance_{d_k} 2^(-2 (M_{k,d_k} + R_k)): R_k = max(0,
/// 0.5 log2(2 ln2 variance_{d_k} / gamma) - M_{k,d_k}) with gamma bisected
/// until the budget binds.  Throws std::invalid_argument for a negative
/// budget.
LcuDeliveryRates lcu_delivery_rates(const NetworkInstance& instance,
                                    const LcuCacheAllocation& cache,
                                    const Demand& demand, double rate_budget);

/// Expected network distortion of the unicast baseline at the instance's
/// rate budget: composes the cache allocation with per-demand delivery
/// splits, averaged by expected_demand_distortion (exact enumeration when
/// the demand space is small, seeded Monte Carlo otherwise).
double lcu_expected_distortion(const NetworkInstance& instance, long trials,
                               std::uint64_t seed);

/// Sweeps (cache size, rate budget) pairs; one TradeoffPoint per pair, in
/// the given order (cache sizes outer, budgets inner).
std::vector<TradeoffPoint> lcu_distortion_curve(NetworkInstance instance,
                                                const std::vector<double>& cache_sizes,
                                                const std::vector<double>& rate_budgets,
                                                long trials, std::uint64_t seed);

}  // namespace cachesim
