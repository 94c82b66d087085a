#include "cachesim/ccm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cachesim/common.hpp"
#include "cachesim/rate_bounds.hpp"
#include "cachesim/waterfill.hpp"

namespace cachesim {

namespace {

constexpr double kLog2E2 = 1.3862943611198906;  // 2 ln 2
constexpr int kBisectIterations = 200;

/// Budget consumed by the uniform design's coded phase at (m_tilde, r_tilde):
/// the cheaper of the closed-form coded rate (the whole library cached as one
/// group) and the packet-side bound N(1-(1-1/N)^K) r_tilde.
double uniform_consumed(double m_tilde, double r_tilde, int K, int N,
                        double packet_coeff) {
    double coded = two_group_coded_rate(static_cast<double>(N) * m_tilde,
                                        static_cast<double>(N), r_tilde, 0.0,
                                        1.0, K);
    return std::min(coded, packet_coeff * r_tilde);
}

/// Bisects r_tilde in [0, R] until the consumed budget equals R.
double uniform_rate_for(double m_tilde, double R, int K, int N,
                        double packet_coeff) {
    if (R <= 0.0) return 0.0;
    const double tol = 1e-12 * std::max(1.0, R);
    double lo = 0.0;
    double hi = R;  // consumed(R) >= R because both terms dominate r_tilde
    double mid = R;
    for (int it = 0; it < kBisectIterations; ++it) {
        mid = 0.5 * (lo + hi);
        double used = uniform_consumed(m_tilde, mid, K, N, packet_coeff);
        if (std::fabs(used - R) <= tol) break;
        if (used < R) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

struct UniformGridResult {
    double m_tilde = 0.0;
    double r_tilde = 0.0;
    double distortion = 0.0;
};

UniformGridResult uniform_grid_search(double cap, double R, int K, int N,
                                      double sigma2, int grid_points,
                                      double packet_coeff) {
    UniformGridResult best;
    best.distortion = std::numeric_limits<double>::infinity();
    const int last = grid_points - 1;
    for (int g = 0; g <= last; ++g) {
        double m = cap <= 0.0
                       ? 0.0
                       : (g == last ? cap
                                    : cap * static_cast<double>(g) /
                                          static_cast<double>(last));
        double r = uniform_rate_for(m, R, K, N, packet_coeff);
        double d = sigma2 * std::exp2(-2.0 * (m + r));
        if (d < best.distortion) {
            best = UniformGridResult{m, r, d};
        }
        if (cap <= 0.0) break;
    }
    return best;
}

}  // namespace

UniformDesign solve_uniform(int num_receivers, int num_files, double sigma2,
                            double cache_size, double rate_budget,
                            int grid_points) {
    if (num_receivers < 1 || num_files < 1) {
        throw std::invalid_argument("solve_uniform: need receivers and files");
    }
    if (!(sigma2 > 0.0) || cache_size < 0.0 || rate_budget < 0.0) {
        throw std::invalid_argument("solve_uniform: nonnegative budgets and positive variance required");
    }
    if (grid_points < 2) {
        throw std::invalid_argument("solve_uniform: need at least two grid points");
    }
    const int K = num_receivers;
    const int N = num_files;
    const double packet_coeff =
        static_cast<double>(N) *
        (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(N), K));

    UniformDesign design;
    // Primary accounting: the cache stores m_tilde from every one of the N
    // files, so the per-file share is bounded by cache_size / N.
    UniformGridResult primary =
        uniform_grid_search(cache_size / static_cast<double>(N), rate_budget, K,
                            N, sigma2, grid_points, packet_coeff);
    design.m_tilde = primary.m_tilde;
    design.r_tilde = primary.r_tilde;
    design.expected_distortion = primary.distortion;
    // Published-program accounting (per-file cache bounded by the whole cache
    // size); diagnostic only.
    UniformGridResult printed = uniform_grid_search(
        cache_size, rate_budget, K, N, sigma2, grid_points, packet_coeff);
    design.printed_m_tilde = printed.m_tilde;
    design.printed_r_tilde = printed.r_tilde;
    design.printed_expected_distortion = printed.distortion;
    return design;
}

std::vector<double> multicast_weights(const std::vector<double>& q,
                                      int num_receivers) {
    std::vector<double> weights(q.size());
    for (std::size_t n = 0; n < q.size(); ++n) {
        weights[n] = 1.0 - std::pow(1.0 - q[n], num_receivers);
    }
    return weights;
}

std::vector<double> uncoded_residual_waterfill(
    const std::vector<double>& variances, const std::vector<double>& base_rates,
    const std::vector<double>& weights, double residual) {
    const std::size_t N = variances.size();
    if (base_rates.size() != N || weights.size() != N) {
        throw std::invalid_argument(
            "uncoded_residual_waterfill: argument lengths must match");
    }
    if (residual < 0.0) {
        throw std::invalid_argument("uncoded_residual_waterfill: negative residual");
    }
    std::vector<double> gains(N);
    for (std::size_t n = 0; n < N; ++n) {
        gains[n] = weights[n] * variances[n] * std::exp2(-2.0 * base_rates[n]);
    }
    return reverse_waterfill(gains, weights, residual).alloc;
}

namespace {

/// One popularity group of a two-group candidate, pre-sorted by the
/// file-threshold constant c_n = log2(2 ln2 variance_n) descending so a
/// candidate's water level falls out of a two-pointer merge with prefix sums
/// (thresholds inside a group share one shift -2*base, preserving the order).
struct GroupArrays {
    std::vector<int> files;        // group member file ids, c descending
    std::vector<double> c;         // log2(2 ln2 sigma_n^2)
    std::vector<double> w_prefix;  // prefix sums of weights (w_prefix[i] = sum of first i)
    std::vector<double> wc_prefix; // prefix sums of w_n * c_n
    std::vector<double> q_prefix;  // prefix sums of q_n
    std::vector<double> qv_suffix; // suffix sums of q_n * sigma_n^2 (qv_suffix[i] = sum from i on)
    double weight_total = 0.0;
};

GroupArrays make_group(const std::vector<int>& members,
                       const std::vector<double>& c_all,
                       const std::vector<double>& weights,
                       const std::vector<double>& q,
                       const std::vector<double>& variances) {
    GroupArrays g;
    // Only positively weighted files take part in the water level; zero-weight
    // files have zero popularity, hence no distortion share either.
    for (int n : members) {
        if (weights[static_cast<std::size_t>(n)] > 0.0) g.files.push_back(n);
    }
    std::stable_sort(g.files.begin(), g.files.end(), [&](int a, int b) {
        return c_all[static_cast<std::size_t>(a)] > c_all[static_cast<std::size_t>(b)];
    });
    const std::size_t m = g.files.size();
    g.c.resize(m);
    g.w_prefix.assign(m + 1, 0.0);
    g.wc_prefix.assign(m + 1, 0.0);
    g.q_prefix.assign(m + 1, 0.0);
    g.qv_suffix.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        int n = g.files[i];
        g.c[i] = c_all[static_cast<std::size_t>(n)];
        g.w_prefix[i + 1] = g.w_prefix[i] + weights[static_cast<std::size_t>(n)];
        g.wc_prefix[i + 1] =
            g.wc_prefix[i] + weights[static_cast<std::size_t>(n)] * g.c[i];
        g.q_prefix[i + 1] = g.q_prefix[i] + q[static_cast<std::size_t>(n)];
    }
    for (std::size_t i = m; i-- > 0;) {
        int n = g.files[i];
        g.qv_suffix[i] = g.qv_suffix[i + 1] +
                         q[static_cast<std::size_t>(n)] *
                             variances[static_cast<std::size_t>(n)];
    }
    for (int n : members) g.weight_total += weights[static_cast<std::size_t>(n)];
    return g;
}

/// Exact KKT water level for the merged two-group residual program, plus the
/// resulting expected distortion.  Active files all sit at the common
/// distortion plateau q_n * 2^u / (2 ln2); inactive ones keep their base-rate
/// distortion.
double residual_distortion(const GroupArrays& g1, const GroupArrays& g2,
                           double shift1, double shift2, double residual,
                           double base1, double base2) {
    auto head = [](const GroupArrays& g, std::size_t i, double shift) {
        return i < g.files.size() ? g.c[i] + shift
                                  : -std::numeric_limits<double>::infinity();
    };
    std::size_t i = 0;
    std::size_t j = 0;
    double u = std::numeric_limits<double>::infinity();
    if (residual > 0.0 && (!g1.files.empty() || !g2.files.empty())) {
        for (;;) {
            double h1 = head(g1, i, shift1);
            double h2 = head(g2, j, shift2);
            if (h1 >= h2) {
                ++i;
            } else {
                ++j;
            }
            double sw = g1.w_prefix[i] + g2.w_prefix[j];
            double sa = g1.wc_prefix[i] + shift1 * g1.w_prefix[i] +
                        g2.wc_prefix[j] + shift2 * g2.w_prefix[j];
            double candidate = (sa - 2.0 * residual) / sw;
            double next = std::max(head(g1, i, shift1), head(g2, j, shift2));
            if (candidate >= next) {
                u = candidate;
                break;
            }
        }
    }
    double plateau = std::isfinite(u) ? std::exp2(u) / kLog2E2 : 0.0;
    double active_mass = g1.q_prefix[i] + g2.q_prefix[j];
    double d = plateau * active_mass;
    d += std::exp2(-2.0 * base1) * g1.qv_suffix[i];
    d += std::exp2(-2.0 * base2) * g2.qv_suffix[j];
    return d;
}

struct CandidateEval {
    bool feasible = false;
    double distortion = std::numeric_limits<double>::infinity();
    double coded_used = 0.0;
};

}  // namespace

TwoGroupDesign solve_two_group(const NetworkInstance& instance,
                               double rate_budget,
                               const SearchGrid& grid) {
    instance.validate();
    if (!instance.symmetric_receivers()) {
        throw std::invalid_argument(
            "solve_two_group: receivers must share one cache size and demand "
            "pmf; use the unicast baseline for heterogeneous receivers");
    }
    if (rate_budget < 0.0) {
        throw std::invalid_argument("solve_two_group: negative rate budget");
    }
    if (grid.points < 2 || grid.refinements < 0 || grid.refine_factor < 2) {
        throw std::invalid_argument("solve_two_group: malformed search grid");
    }
    const int K = instance.num_receivers();
    const int N = instance.num_files();
    const double M = instance.receivers.front().cache_size;
    const std::vector<double>& q = instance.receivers.front().demand_pmf;
    std::vector<double> variances(static_cast<std::size_t>(N));
    std::vector<double> c_all(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        variances[static_cast<std::size_t>(n)] =
            instance.files[static_cast<std::size_t>(n)].variance;
        c_all[static_cast<std::size_t>(n)] =
            std::log2(kLog2E2 * variances[static_cast<std::size_t>(n)]);
    }
    std::vector<double> weights = multicast_weights(q, K);

    // Cached-group membership ranked by popularity-variance product.
    std::vector<int> ranking(static_cast<std::size_t>(N));
    std::iota(ranking.begin(), ranking.end(), 0);
    std::stable_sort(ranking.begin(), ranking.end(), [&](int a, int b) {
        return q[static_cast<std::size_t>(a)] * variances[static_cast<std::size_t>(a)] >
               q[static_cast<std::size_t>(b)] * variances[static_cast<std::size_t>(b)];
    });

    struct Best {
        double distortion = std::numeric_limits<double>::infinity();
        int n_top = 0;
        double r1 = 0.0;
        double r2 = 0.0;
    } best;

    const double feasibility_slack = 1e-12 * std::max(1.0, rate_budget);
    for (int n_top = 1; n_top <= N; ++n_top) {
        std::vector<int> top(ranking.begin(), ranking.begin() + n_top);
        std::vector<int> rest(ranking.begin() + n_top, ranking.end());
        double popular_mass = 0.0;
        for (int n : top) popular_mass += q[static_cast<std::size_t>(n)];
        const double m_tilde = M / static_cast<double>(n_top);
        GroupArrays g1 = make_group(top, c_all, weights, q, variances);
        GroupArrays g2 = make_group(rest, c_all, weights, q, variances);

        auto evaluate = [&](double r1, double r2) {
            CandidateEval eval;
            double coded = two_group_coded_rate(M, static_cast<double>(n_top),
                                                r1, r2, popular_mass, K);
            double packet = g1.weight_total * r1 + g2.weight_total * r2;
            eval.coded_used = std::min(coded, packet);
            if (eval.coded_used > rate_budget + feasibility_slack) return eval;
            eval.feasible = true;
            double residual = std::max(0.0, rate_budget - eval.coded_used);
            double base1 = m_tilde + r1;
            double base2 = r2;
            eval.distortion = residual_distortion(g1, g2, -2.0 * base1,
                                                  -2.0 * base2, residual,
                                                  base1, base2);
            return eval;
        };

        struct LocalBest {
            double distortion = std::numeric_limits<double>::infinity();
            double r1 = 0.0;
            double r2 = 0.0;
        } local;

        double step = rate_budget / static_cast<double>(grid.points - 1);
        double lo1 = 0.0;
        double lo2 = 0.0;
        int span = grid.points - 1;
        for (int pass = 0; pass <= grid.refinements; ++pass) {
            if (pass > 0) {
                step /= static_cast<double>(grid.refine_factor);
                double half = step * static_cast<double>(span) / 2.0;
                lo1 = std::clamp(local.r1 - half, 0.0,
                                 std::max(0.0, rate_budget - 2.0 * half));
                lo2 = std::clamp(local.r2 - half, 0.0,
                                 std::max(0.0, rate_budget - 2.0 * half));
            }
            if (rate_budget <= 0.0) {
                CandidateEval eval = evaluate(0.0, 0.0);
                if (eval.feasible) local = LocalBest{eval.distortion, 0.0, 0.0};
                break;
            }
            for (int a = 0; a <= span; ++a) {
                double r1 = lo1 + step * static_cast<double>(a);
                for (int b = 0; b <= span; ++b) {
                    double r2 = lo2 + step * static_cast<double>(b);
                    CandidateEval eval = evaluate(r1, r2);
                    if (eval.feasible && eval.distortion < local.distortion) {
                        local = LocalBest{eval.distortion, r1, r2};
                    }
                }
            }
        }
        if (local.distortion < best.distortion) {
            best = Best{local.distortion, n_top, local.r1, local.r2};
        }
    }

    // Materialize the winning candidate through the public residual
    // water-filler (bisection, same KKT machinery as the unicast baseline).
    TwoGroupDesign design;
    design.n_top = best.n_top;
    design.m_tilde = M / static_cast<double>(best.n_top);
    design.r1 = best.r1;
    // With an empty second group r2 never enters the objective or the
    // constraint; pin it to zero instead of reporting a residual grid value.
    design.r2 = best.n_top == N ? 0.0 : best.r2;
    design.top_files.assign(ranking.begin(), ranking.begin() + best.n_top);
    design.popular_mass = 0.0;
    for (int n : design.top_files) design.popular_mass += q[static_cast<std::size_t>(n)];

    std::vector<char> in_top(static_cast<std::size_t>(N), 0);
    for (int n : design.top_files) in_top[static_cast<std::size_t>(n)] = 1;
    std::vector<double> base(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        base[static_cast<std::size_t>(n)] =
            in_top[static_cast<std::size_t>(n)] ? design.m_tilde + design.r1
                                                : design.r2;
    }
    double coded = two_group_coded_rate(M, static_cast<double>(design.n_top),
                                        design.r1, design.r2,
                                        design.popular_mass, K);
    double packet = 0.0;
    for (int n = 0; n < N; ++n) {
        packet += weights[static_cast<std::size_t>(n)] *
                  (in_top[static_cast<std::size_t>(n)] ? design.r1 : design.r2);
    }
    design.coded_rate = std::min(coded, packet);
    double residual = std::max(0.0, rate_budget - design.coded_rate);
    design.uncoded_rates =
        uncoded_residual_waterfill(variances, base, weights, residual);
    design.uncoded_rate = 0.0;
    design.expected_distortion = 0.0;
    for (int n = 0; n < N; ++n) {
        design.uncoded_rate += weights[static_cast<std::size_t>(n)] *
                               design.uncoded_rates[static_cast<std::size_t>(n)];
        design.expected_distortion +=
            q[static_cast<std::size_t>(n)] * variances[static_cast<std::size_t>(n)] *
            std::exp2(-2.0 * (base[static_cast<std::size_t>(n)] +
                              design.uncoded_rates[static_cast<std::size_t>(n)]));
    }
    return design;
}

std::vector<TradeoffPoint> ccm_distortion_curve(
    NetworkInstance instance, const std::vector<double>& cache_sizes,
    const std::vector<double>& rate_budgets) {
    std::vector<TradeoffPoint> points;
    points.reserve(cache_sizes.size() * rate_budgets.size());
    for (double M : cache_sizes) {
        for (Receiver& r : instance.receivers) r.cache_size = M;
        for (double R : rate_budgets) {
            instance.rate_budget = R;
            TradeoffPoint point;
            point.scheme = Scheme::kCcm;
            point.cache_size = M;
            point.rate_budget = R;
            point.has_design_diagnostics = true;
            if (instance.fully_symmetric()) {
                UniformDesign u = solve_uniform(
                    instance.num_receivers(), instance.num_files(),
                    instance.files.front().variance, M, R);
                point.expected_distortion = u.expected_distortion;
                point.coded_rate = R;
                point.uncoded_rate = 0.0;
                point.n_top = static_cast<double>(instance.num_files());
                point.r1 = u.r_tilde;
                point.r2 = 0.0;
            } else {
                TwoGroupDesign d = solve_two_group(instance, R);
                point.expected_distortion = d.expected_distortion;
                point.coded_rate = d.coded_rate;
                point.uncoded_rate = d.uncoded_rate;
                point.n_top = static_cast<double>(d.n_top);
                point.r1 = d.r1;
                point.r2 = d.r2;
            }
            points.push_back(point);
        }
    }
    return points;
}

CacheDesign to_cache_design(const TwoGroupDesign& design, int num_receivers,
                            int num_files, double cache_size) {
    std::vector<double> range(static_cast<std::size_t>(num_files), design.r2);
    std::vector<double> split(static_cast<std::size_t>(num_files), 0.0);
    for (int n : design.top_files) {
        range[static_cast<std::size_t>(n)] = design.m_tilde + design.r1;
        split[static_cast<std::size_t>(n)] =
            1.0 / static_cast<double>(design.n_top);
    }
    return receiver_symmetric_design(range, split, cache_size, num_receivers);
}

}  // namespace cachesim
