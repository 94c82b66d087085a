#pragma once

#include <cstdint>
#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/model.hpp"

namespace cachesim {

/// Exact-enumeration cap on the receiver count for the closed-form bounds
/// (they sum over 2^K receiver subsets per segment).
inline constexpr int kExactReceiverCap = 16;

/// A coded-delivery rate upper bound: the label-grouped coloring is bounded
/// by `label_bound`, the one-color-per-packet coloring by `packet_bound`,
/// and the delivery scheme takes the cheaper of the two.
struct BoundResult {
    double label_bound = 0.0;
    double packet_bound = 0.0;
    double value = 0.0;  // min(label_bound, packet_bound)
    enum class Method { kExact, kMonteCarlo } method = Method::kExact;
    double mc_stderr = 0.0;  // 0 for exact evaluations
};

/// Probability that one packet of file n inside segment i carries the exact
/// receiver label {k} ∪ (subset \ {k}): receiver k misses it, every other
/// receiver in `subset` caches it, every remaining receiver in `active`
/// misses it.  Sets are receiver bitmasks; `active` is the segment's live
/// receiver set and must contain `subset`, which must contain k.  Throws
/// std::invalid_argument on violated set relations.
double label_probability(std::uint32_t subset, int k, int n,
                         std::uint32_t active, const CacheDesign& design);

/// Per-demand bound on the label-grouped coloring: receivers sorted by the
/// length of their requested version (ties by index) split the packet range
/// into segments; each segment sums, over the nonempty subsets of its live
/// receivers, the largest per-receiver label probability.  Exact subset
/// enumeration; throws std::invalid_argument above kExactReceiverCap.
double label_bound_for_demand(const Demand& demand, const CacheDesign& design);

/// Per-demand bound on the per-packet coloring: for each requested file,
/// longest requested version minus the smallest requester cache share.
double packet_bound_for_demand(const Demand& demand, const CacheDesign& design);

/// min of the two per-demand bounds.
BoundResult demand_rate_bound(const Demand& demand, const CacheDesign& design);

/// Probability that (k, n) attains the maximum label probability over
/// receiver set `subset` when each receiver s in it independently draws its
/// file from q[s].  Exact product formula; argmax ties are broken by
/// smallest (receiver, file) pair so the values sum to one over (k, n).
double argmax_probability(std::uint32_t subset, int k, int n,
                          std::uint32_t active, const CacheDesign& design,
                          const std::vector<std::vector<double>>& q);

/// Expected-rate bound over random demands for heterogeneous receivers.
/// The label side relaxes every request to the receiver's longest version
/// (so it upper-bounds the demand-average of the per-demand bound, with
/// equality when each receiver's versions all have one length); the packet
/// side weights each file by the probability anyone requests it.  Demand
/// pmfs are taken from the instance.  Throws std::invalid_argument above
/// kExactReceiverCap.
BoundResult expected_rate_bound(const NetworkInstance& instance,
                                const CacheDesign& design);

/// Per-demand bound specialized to file-symmetric designs (each receiver's
/// versions share one length Omega_k and one split p_k).  Evaluates the
/// specialized per-receiver-scalar kernel with the same loop structure as
/// the general one, so results agree bit-for-bit with demand_rate_bound on
/// the replicated design.  Throws std::invalid_argument when the design is
/// not file-symmetric.
BoundResult file_symmetric_rate_bound(const Demand& demand,
                                      const CacheDesign& design);

/// Worst demand for a file-symmetric design by exhaustive enumeration
/// (demand spaces up to 1e5; throws std::invalid_argument beyond).
struct WorstCaseBound {
    BoundResult bound;
    Demand demand;
};
WorstCaseBound file_symmetric_worst_case(const CacheDesign& design);

/// Expected-rate bound for symmetric receivers (shared demand pmf q, cache
/// size, and split; per-file version lengths).  Files sorted by version
/// length split the packet range into segments; each segment keeps the
/// expected number of live receivers (receivers whose request reaches it),
/// rounded to an integer for the binomial subset count, with the unrounded
/// values reported as diagnostics.
struct SymmetricExpectedBound {
    BoundResult bound;
    std::vector<double> expected_live_receivers;  // unrounded, per segment
    std::vector<int> rounded_live_receivers;
};
SymmetricExpectedBound receiver_symmetric_expected_bound(
    const std::vector<double>& q, double cache_size,
    const std::vector<double>& split, const std::vector<double>& storing_range,
    int num_receivers);

/// Closed-form expected coded rate of the two-group design: the top group
/// (n_top files carrying `popular_mass` of the demand) is cached uniformly
/// and served at per-file coded rate r1, the rest uncached at r2.
/// cache_size is the total receiver cache M; the M -> 0 limit branch
/// K*popular_mass*r1 + K*(1-popular_mass)*r2 applies below 1e-9.
double two_group_coded_rate(double cache_size, double n_top, double r1,
                            double r2, double popular_mass, int num_receivers);

}  // namespace cachesim
