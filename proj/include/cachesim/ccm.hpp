#pragma once

#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/model.hpp"

namespace cachesim {

/// Solution of the fully symmetric design problem (uniform popularity, equal
/// variances, equal caches): every (receiver, file) pair shares one cached
/// prefix m_tilde and one coded top-up r_tilde.
struct UniformDesign {
    double m_tilde = 0.0;  // per-file cached bits (grid over [0, M/N])
    double r_tilde = 0.0;  // per-file coded rate making the budget bind
    double expected_distortion = 0.0;
    // The published program leaves the per-file cache bounded by M itself
    // instead of the per-file share M/N; that reading is inconsistent with
    // a K-receiver cache of size M split across N files, and its optimum is
    // reported here for diagnosis only.
    double printed_m_tilde = 0.0;
    double printed_r_tilde = 0.0;
    double printed_expected_distortion = 0.0;
};

/// Grid search on the per-file cache share (default 2001 points) with, for
/// each candidate, a bisection on the coded rate until the expected-rate
/// constraint binds.  sigma2 is the common file variance.  M = 0 and R = 0
/// degenerate budgets return the matching boundary designs.
UniformDesign solve_uniform(int num_receivers, int num_files, double sigma2,
                            double cache_size, double rate_budget,
                            int grid_points = 2001);

/// Solution of the two-group design problem for symmetric receivers with
/// arbitrary variances and popularities: the n_top files with the largest
/// popularity-variance products are cached uniformly and granted coded rate
/// r1 each; the rest are uncached with coded rate r2; leftover budget buys
/// per-file uncoded layers.
struct TwoGroupDesign {
    int n_top = 0;
    double m_tilde = 0.0;       // cache_size / n_top
    double r1 = 0.0;
    double r2 = 0.0;
    double popular_mass = 0.0;  // demand probability of the cached group
    std::vector<int> top_files;
    std::vector<double> uncoded_rates;  // per-file residual layer
    double coded_rate = 0.0;    // expected budget consumed by coded blocks
    double uncoded_rate = 0.0;  // expected budget consumed by uncoded layers
    double expected_distortion = 0.0;
};

/// Search schedule for the (r1, r2) plane: a coarse points x points grid on
/// [0, R]^2 followed by `refinements` local zooms, each shrinking the step
/// by `refine_factor`.
struct SearchGrid {
    int points = 41;
    int refinements = 2;
    int refine_factor = 4;
};

/// Outer loop over the cut-off size, inner grid over (r1, r2); for each
/// candidate the coded budget consumed is the cheaper of the closed-form
/// two-group rate and the symmetric-receiver packet-side bound, and the
/// residual buys uncoded layers via uncoded_residual_waterfill.  Throws
/// std::invalid_argument for asymmetric receivers.
TwoGroupDesign solve_two_group(const NetworkInstance& instance,
                               double rate_budget,
                               const SearchGrid& grid = {});

/// Reverse water-filling of a residual budget into per-file uncoded layers:
/// minimizes sum_n weight_n * variance_n * 2^(-2 (base_n + x_n)) subject to
/// sum_n weight_n * x_n <= residual, x >= 0.  The weight of a file is the
/// probability at least one receiver requests it — an uncoded layer is paid
/// for once but serves every requester.
std::vector<double> uncoded_residual_waterfill(
    const std::vector<double>& variances, const std::vector<double>& base_rates,
    const std::vector<double>& weights, double residual);

/// Per-file multicast weights 1 - (1 - q_n)^K.
std::vector<double> multicast_weights(const std::vector<double>& q,
                                      int num_receivers);

/// Sweeps (cache size, rate budget) pairs with the coded scheme, dispatching
/// to solve_uniform for fully symmetric instances and solve_two_group
/// otherwise; cache sizes outer, budgets inner.
std::vector<TradeoffPoint> ccm_distortion_curve(
    NetworkInstance instance, const std::vector<double>& cache_sizes,
    const std::vector<double>& rate_budgets);

/// Replicates a two-group solution into a packet-level caching design for
/// simulation and bound evaluation.
CacheDesign to_cache_design(const TwoGroupDesign& design, int num_receivers,
                            int num_files, double cache_size);

}  // namespace cachesim
