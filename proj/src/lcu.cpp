#include "cachesim/lcu.hpp"

#include <cmath>
#include <stdexcept>

#include "cachesim/common.hpp"
#include "cachesim/waterfill.hpp"

namespace cachesim {

LcuReceiverAllocation lcu_cache_allocation(const Receiver& receiver,
                                           const std::vector<SourceFile>& files) {
    if (receiver.cache_size < 0.0) {
        throw std::invalid_argument("lcu_cache_allocation: negative cache size");
    }
    const std::size_t N = files.size();
    if (receiver.demand_pmf.size() != N) {
        throw std::invalid_argument(
            "lcu_cache_allocation: demand pmf length must match file count");
    }
    std::vector<double> gains(N);
    bool any_positive = false;
    for (std::size_t n = 0; n < N; ++n) {
        gains[n] = receiver.demand_pmf[n] * files[n].variance;
        any_positive = any_positive || gains[n] > 0.0;
    }
    if (!any_positive) {
        throw std::invalid_argument(
            "lcu_cache_allocation: every popularity-variance product is zero");
    }
    WaterfillResult wf = reverse_waterfill(gains, {}, receiver.cache_size);
    return LcuReceiverAllocation{wf.alloc, std::exp2(wf.water_level)};
}

LcuCacheAllocation lcu_place(const NetworkInstance& instance) {
    LcuCacheAllocation result;
    result.allocations.reserve(instance.receivers.size());
    result.water_levels.reserve(instance.receivers.size());
    for (const Receiver& receiver : instance.receivers) {
        LcuReceiverAllocation row = lcu_cache_allocation(receiver, instance.files);
        result.allocations.push_back(std::move(row.allocation));
        result.water_levels.push_back(row.water_level);
    }
    return result;
}

LcuDeliveryRates lcu_delivery_rates(const NetworkInstance& instance,
                                    const LcuCacheAllocation& cache,
                                    const Demand& demand, double rate_budget) {
    if (rate_budget < 0.0) {
        throw std::invalid_argument("lcu_delivery_rates: negative rate budget");
    }
    const std::size_t K = instance.receivers.size();
    if (demand.size() != K || cache.allocations.size() != K) {
        throw std::invalid_argument(
            "lcu_delivery_rates: demand/cache shape must match receiver count");
    }
    // Gain of receiver k is its residual distortion scale after the cached
    // prefix: variance_{d_k} * 2^(-2 M_{k,d_k}).
    std::vector<double> gains(K);
    for (std::size_t k = 0; k < K; ++k) {
        int n = demand[k];
        if (n < 0 || n >= instance.num_files()) {
            throw std::invalid_argument("lcu_delivery_rates: demand index out of range");
        }
        double cached = cache.allocations[k][static_cast<std::size_t>(n)];
        gains[k] = instance.files[static_cast<std::size_t>(n)].variance *
                   std::exp2(-2.0 * cached);
    }
    WaterfillResult wf = reverse_waterfill(gains, {}, rate_budget);
    return LcuDeliveryRates{wf.alloc, std::exp2(wf.water_level)};
}

double lcu_expected_distortion(const NetworkInstance& instance, long trials,
                               std::uint64_t seed) {
    LcuCacheAllocation cache = lcu_place(instance);
    auto effective = [&](const Demand& d) {
        LcuDeliveryRates delivery =
            lcu_delivery_rates(instance, cache, d, instance.rate_budget);
        std::vector<double> rates(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            rates[k] = effective_rate(
                cache.allocations[k][static_cast<std::size_t>(d[k])],
                delivery.rates[k]);
        }
        return rates;
    };
    return expected_demand_distortion(instance, effective, trials, seed);
}

std::vector<TradeoffPoint> lcu_distortion_curve(
    NetworkInstance instance, const std::vector<double>& cache_sizes,
    const std::vector<double>& rate_budgets, long trials, std::uint64_t seed) {
    std::vector<TradeoffPoint> points;
    points.reserve(cache_sizes.size() * rate_budgets.size());
    std::uint64_t row = 0;
    for (double M : cache_sizes) {
        for (Receiver& r : instance.receivers) r.cache_size = M;
        for (double R : rate_budgets) {
            instance.rate_budget = R;
            TradeoffPoint point;
            point.scheme = Scheme::kLcu;
            point.cache_size = M;
            point.rate_budget = R;
            point.expected_distortion =
                lcu_expected_distortion(instance, trials, derive_seed(seed, row));
            point.coded_rate = 0.0;
            point.uncoded_rate = R;
            points.push_back(point);
            ++row;
        }
    }
    return points;
}

}  // namespace cachesim
