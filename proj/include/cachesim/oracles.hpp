#pragma once

#include <cstdint>
#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/model.hpp"
#include "cachesim/rfgcc.hpp"

namespace cachesim::oracles {

// Independent reference implementations used to validate the production
// code paths.  Each oracle deliberately takes a different algorithmic route
// from the code it checks (generic first-order solver instead of the KKT
// bisection, exhaustive search instead of the structured coloring, brute
// enumeration instead of closed forms) so that agreement is evidence rather
// than tautology.

/// Objective of the reverse water-filling problem:
/// sum_i gain_i * 2^(-2 x_i).
double waterfill_objective(const std::vector<double>& gains,
                           const std::vector<double>& x);

/// Projected-gradient (FISTA) solver for
///   minimize sum_i gain_i 2^(-2 x_i)  s.t.  sum_i cost_i x_i <= budget, x >= 0.
/// Projection onto the weighted simplex-with-interior is done by bisecting
/// the dual offset.  Accurate to ~1e-9 in objective for the sizes used in
/// tests; entirely independent of the closed-form KKT solution.
std::vector<double> projected_gradient_waterfill(
    const std::vector<double>& gains, const std::vector<double>& costs,
    double budget, int iterations = 20000);

/// Exact chromatic number by branch-and-bound over color assignments,
/// feasible up to ~12 vertices.  `adjacent(i, j)` supplied as a dense
/// matrix.
int exhaustive_chromatic_number(const std::vector<std::vector<bool>>& adj);

/// Dense adjacency matrix of a conflict graph (for the exhaustive solver).
std::vector<std::vector<bool>> dense_adjacency(const ConflictGraph& graph);

/// All demand vectors of an instance in lexicographic order.  Throws
/// std::invalid_argument when there are more than `cap` of them.
std::vector<Demand> enumerate_demands(const NetworkInstance& instance,
                                      long cap = 1000000);

/// Probability of one demand vector under the receivers' preference pmfs.
double demand_probability(const NetworkInstance& instance,
                          const Demand& demand);

/// Literal transcription of the per-label coverage probability: the chance
/// that, at a given depth segment, the packet of receiver k for file n is
/// cached by exactly the receivers in `subset` among `active` and missed by
/// k itself.  Same quantity as cachesim::label_probability but written as
/// one flat product in a different term order.
double label_probability_reference(std::uint32_t subset, int k, int n,
                                   std::uint32_t active,
                                   const CacheDesign& design);

/// Per-demand label-side bound recomputed by brute force: enumerates every
/// (segment, subset) pair directly from the definition with an explicit
/// inner max loop.  Organized differently from the production evaluator.
double label_bound_reference(const Demand& demand, const CacheDesign& design);

/// Probability that (k, n) attains the maximum coverage probability among
/// the random demands of `subset`, computed by enumerating all |subset|-fold
/// file assignments (N^|subset| terms).  Ties resolved toward the smallest
/// (receiver, file) pair.
double argmax_probability_reference(std::uint32_t subset, int k, int n,
                                    std::uint32_t active,
                                    const CacheDesign& design,
                                    const std::vector<std::vector<double>>& q);

/// Infinite-resolution limit of the label-grouped coloring rate for a fixed
/// demand: sum over realized labels of the largest per-receiver queue
/// length, each queue length an integral of coverage probabilities over
/// packet depth (piecewise constant between sorted cached-range
/// breakpoints).
double label_grouped_rate_limit(const Demand& demand,
                                const CacheDesign& design);

/// Infinite-resolution limit of the one-color-per-packet rate: for each
/// requested file, the measure of packet depths not cached by at least one
/// of its requesters.
double per_packet_rate_limit(const Demand& demand, const CacheDesign& design);

}  // namespace cachesim::oracles
