#include "cachesim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cachesim/common.hpp"
#include "cachesim/rate_bounds.hpp"

namespace cachesim::oracles {

double waterfill_objective(const std::vector<double>& gains,
                           const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        total += gains[i] * std::exp2(-2.0 * x[i]);
    }
    return total;
}

namespace {

/// Euclidean projection onto {x >= 0, sum_i c_i x_i <= B}: clip first; if the
/// budget still overflows, bisect the dual offset theta of the equality
/// projection x_i = max(0, y_i - theta c_i).
std::vector<double> project_feasible(std::vector<double> y,
                                     const std::vector<double>& costs,
                                     double budget) {
    double spent = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) y[i] = 0.0;
        spent += costs[i] * y[i];
    }
    if (spent <= budget) return y;
    double lo = 0.0;
    double hi = 1.0;
    auto spend_at = [&](double theta) {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double v = y[i] - theta * costs[i];
            if (v > 0.0) s += costs[i] * v;
        }
        return s;
    };
    while (spend_at(hi) > budget) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (spend_at(mid) > budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double theta = hi;
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::max(0.0, y[i] - theta * costs[i]);
    }
    return y;
}

}  // namespace

std::vector<double> projected_gradient_waterfill(
    const std::vector<double>& gains, const std::vector<double>& costs,
    double budget, int iterations) {
    const std::size_t n = gains.size();
    std::vector<double> cost(n, 1.0);
    if (!costs.empty()) {
        if (costs.size() != n) {
            throw std::invalid_argument(
                "projected_gradient_waterfill: gains/costs length mismatch");
        }
        cost = costs;
    }
    if (budget <= 0.0) return std::vector<double>(n, 0.0);

    constexpr double kTwoLn2 = 1.3862943611198906;
    double lipschitz = 1e-12;
    for (double g : gains) {
        if (g > 0.0) lipschitz = std::max(lipschitz, 4.0 * std::log(2.0) * std::log(2.0) * g);
    }
    const double step = 1.0 / lipschitz;

    // FISTA with gradient-based adaptive restart.
    std::vector<double> x(n, 0.0);
    std::vector<double> x_prev(n, 0.0);
    std::vector<double> y(n, 0.0);
    double momentum = 1.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) {
            double grad = gains[i] > 0.0
                              ? -kTwoLn2 * gains[i] * std::exp2(-2.0 * y[i])
                              : 0.0;
            z[i] = y[i] - step * grad;
        }
        std::vector<double> x_new = project_feasible(std::move(z), cost, budget);
        double momentum_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        double mix = (momentum - 1.0) / momentum_new;
        double restart_signal = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            restart_signal += (y[i] - x_new[i]) * (x_new[i] - x[i]);
        }
        x_prev = std::move(x);
        x = std::move(x_new);
        if (restart_signal > 0.0) {
            momentum = 1.0;
            y = x;
        } else {
            momentum = momentum_new;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = x[i] + mix * (x[i] - x_prev[i]);
            }
        }
    }
    return x;
}

std::vector<std::vector<bool>> dense_adjacency(const ConflictGraph& graph) {
    const std::size_t n = graph.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            bool e = graph.adjacent(a, b);
            adj[a][b] = e;
            adj[b][a] = e;
        }
    }
    return adj;
}

namespace {

bool colorable(const std::vector<std::vector<bool>>& adj, int colors,
               std::vector<int>& assignment, std::size_t vertex) {
    if (vertex == adj.size()) return true;
    int used = 0;
    for (std::size_t v = 0; v < vertex; ++v) used = std::max(used, assignment[v] + 1);
    int limit = std::min(colors, used + 1);  // symmetry break: first-use order
    for (int c = 0; c < limit; ++c) {
        bool ok = true;
        for (std::size_t v = 0; v < vertex; ++v) {
            if (adj[vertex][v] && assignment[v] == c) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        assignment[vertex] = c;
        if (colorable(adj, colors, assignment, vertex + 1)) return true;
    }
    assignment[vertex] = -1;
    return false;
}

}  // namespace

int exhaustive_chromatic_number(const std::vector<std::vector<bool>>& adj) {
    const std::size_t n = adj.size();
    if (n == 0) return 0;
    if (n > 16) {
        throw std::invalid_argument(
            "exhaustive_chromatic_number: exhaustive search capped at 16 vertices");
    }
    for (int colors = 1; colors <= static_cast<int>(n); ++colors) {
        std::vector<int> assignment(n, -1);
        if (colorable(adj, colors, assignment, 0)) return colors;
    }
    return static_cast<int>(n);
}

std::vector<Demand> enumerate_demands(const NetworkInstance& instance,
                                      long cap) {
    const int K = instance.num_receivers();
    const int N = instance.num_files();
    double total = 1.0;
    for (int k = 0; k < K; ++k) {
        total *= static_cast<double>(N);
        if (total > static_cast<double>(cap)) {
            throw std::invalid_argument("enumerate_demands: demand space above cap");
        }
    }
    std::vector<Demand> demands;
    demands.reserve(static_cast<std::size_t>(total));
    Demand d(static_cast<std::size_t>(K), 0);
    while (true) {
        demands.push_back(d);
        int pos = K - 1;
        while (pos >= 0) {
            int& v = d[static_cast<std::size_t>(pos)];
            if (++v < N) break;
            v = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return demands;
}

double demand_probability(const NetworkInstance& instance,
                          const Demand& demand) {
    double p = 1.0;
    for (std::size_t k = 0; k < demand.size(); ++k) {
        p *= instance.receivers[k].demand_pmf[static_cast<std::size_t>(demand[k])];
    }
    return p;
}

double label_probability_reference(std::uint32_t subset, int k, int n,
                                   std::uint32_t active,
                                   const CacheDesign& design) {
    if ((subset & ~active) != 0 ||
        ((subset >> static_cast<unsigned>(k)) & 1u) == 0) {
        throw std::invalid_argument("label_probability_reference: bad sets");
    }
    const int K = design.num_receivers();
    // Group-by-group in descending receiver order (deliberately different
    // association order from the production evaluator).
    double others_cached = 1.0;
    for (int u = K - 1; u >= 0; --u) {
        if (u == k) continue;
        if ((subset >> static_cast<unsigned>(u)) & 1u) {
            others_cached *= design.cache_prob(u, n);
        }
    }
    double outsiders_missed = 1.0;
    for (int u = K - 1; u >= 0; --u) {
        if (u == k) continue;
        if (((active >> static_cast<unsigned>(u)) & 1u) &&
            !((subset >> static_cast<unsigned>(u)) & 1u)) {
            outsiders_missed *= 1.0 - design.cache_prob(u, n);
        }
    }
    return (1.0 - design.cache_prob(k, n)) * others_cached * outsiders_missed;
}

double label_bound_reference(const Demand& demand, const CacheDesign& design) {
    const int K = design.num_receivers();
    std::vector<double> depth(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        depth[static_cast<std::size_t>(k)] =
            design.storing_range[static_cast<std::size_t>(k)]
                                [static_cast<std::size_t>(demand[static_cast<std::size_t>(k)])];
    }
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)];
    });
    double bound = 0.0;
    for (int i = 0; i < K; ++i) {
        double lower = i == 0 ? 0.0
                              : depth[static_cast<std::size_t>(
                                    order[static_cast<std::size_t>(i - 1)])];
        double width =
            depth[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] - lower;
        if (width <= 0.0) continue;
        std::uint32_t active = 0;
        for (int j = i; j < K; ++j) {
            active |= 1u << static_cast<unsigned>(order[static_cast<std::size_t>(j)]);
        }
        // Walk every mask of [K] and keep those inside the live set (a
        // deliberately different subset enumeration from the production one).
        double segment = 0.0;
        for (std::uint32_t mask = 1; mask < (1u << static_cast<unsigned>(K)); ++mask) {
            if ((mask & ~active) != 0) continue;
            std::vector<double> values;
            for (int k = 0; k < K; ++k) {
                if (((mask >> static_cast<unsigned>(k)) & 1u) == 0) continue;
                values.push_back(label_probability_reference(
                    mask, k, demand[static_cast<std::size_t>(k)], active, design));
            }
            segment += *std::max_element(values.begin(), values.end());
        }
        bound += width * segment;
    }
    return bound;
}

double argmax_probability_reference(std::uint32_t subset, int k, int n,
                                    std::uint32_t active,
                                    const CacheDesign& design,
                                    const std::vector<std::vector<double>>& q) {
    const int K = design.num_receivers();
    const int N = design.num_files();
    std::vector<int> members;
    for (int u = 0; u < K; ++u) {
        if ((subset >> static_cast<unsigned>(u)) & 1u) members.push_back(u);
    }
    const std::size_t m = members.size();
    std::vector<int> assignment(m, 0);
    double total = 0.0;
    while (true) {
        double prob = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            prob *= q[static_cast<std::size_t>(members[i])]
                     [static_cast<std::size_t>(assignment[i])];
        }
        if (prob > 0.0) {
            // Locate the maximizer, ties to the smallest (receiver, file).
            int best_k = -1;
            int best_n = -1;
            double best_v = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                double v = label_probability_reference(
                    subset, members[i], assignment[i], active, design);
                bool better = v > best_v ||
                              (v == best_v &&
                               (members[i] < best_k ||
                                (members[i] == best_k && assignment[i] < best_n)));
                if (better) {
                    best_k = members[i];
                    best_n = assignment[i];
                    best_v = v;
                }
            }
            if (best_k == k && best_n == n) total += prob;
        }
        std::size_t pos = m;
        while (pos-- > 0) {
            if (++assignment[pos] < N) break;
            assignment[pos] = 0;
            if (pos == 0) return total;
        }
    }
}

namespace {

/// Integration breakpoints for one file: the distinct storing-range depths.
std::vector<double> depth_breakpoints(const CacheDesign& design, int n,
                                      double limit) {
    std::vector<double> cuts{0.0, limit};
    for (int u = 0; u < design.num_receivers(); ++u) {
        double omega =
            design.storing_range[static_cast<std::size_t>(u)][static_cast<std::size_t>(n)];
        if (omega > 0.0 && omega < limit) cuts.push_back(omega);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

double label_grouped_rate_limit(const Demand& demand,
                                const CacheDesign& design) {
    const int K = design.num_receivers();
    if (K > 20) {
        throw std::invalid_argument("label_grouped_rate_limit: receiver cap is 20");
    }
    double rate = 0.0;
    for (std::uint32_t label = 1; label < (1u << static_cast<unsigned>(K)); ++label) {
        double longest_queue = 0.0;
        for (int k = 0; k < K; ++k) {
            if (((label >> static_cast<unsigned>(k)) & 1u) == 0) continue;
            int n = demand[static_cast<std::size_t>(k)];
            double own = design.storing_range[static_cast<std::size_t>(k)]
                                             [static_cast<std::size_t>(n)];
            if (own <= 0.0) continue;
            double queue = 0.0;
            std::vector<double> cuts = depth_breakpoints(design, n, own);
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                double mid = 0.5 * (cuts[c] + cuts[c + 1]);
                double density = 1.0 - design.cache_prob(k, n);
                bool possible = true;
                for (int u = 0; u < K && possible; ++u) {
                    if (u == k) continue;
                    bool covers =
                        design.storing_range[static_cast<std::size_t>(u)]
                                            [static_cast<std::size_t>(n)] >= mid;
                    double p = covers ? design.cache_prob(u, n) : 0.0;
                    if ((label >> static_cast<unsigned>(u)) & 1u) {
                        if (p <= 0.0) {
                            possible = false;
                        } else {
                            density *= p;
                        }
                    } else {
                        density *= 1.0 - p;
                    }
                }
                if (possible) queue += (cuts[c + 1] - cuts[c]) * density;
            }
            longest_queue = std::max(longest_queue, queue);
        }
        rate += longest_queue;
    }
    return rate;
}

double per_packet_rate_limit(const Demand& demand, const CacheDesign& design) {
    const int K = design.num_receivers();
    std::vector<int> files;
    for (int k = 0; k < K; ++k) files.push_back(demand[static_cast<std::size_t>(k)]);
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    double rate = 0.0;
    for (int n : files) {
        double longest = 0.0;
        for (int k = 0; k < K; ++k) {
            if (demand[static_cast<std::size_t>(k)] != n) continue;
            longest = std::max(longest,
                               design.storing_range[static_cast<std::size_t>(k)]
                                                   [static_cast<std::size_t>(n)]);
        }
        if (longest <= 0.0) continue;
        std::vector<double> cuts = depth_breakpoints(design, n, longest);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double mid = 0.5 * (cuts[c] + cuts[c + 1]);
            double all_cached = 1.0;
            bool requested = false;
            for (int k = 0; k < K; ++k) {
                if (demand[static_cast<std::size_t>(k)] != n) continue;
                if (design.storing_range[static_cast<std::size_t>(k)]
                                        [static_cast<std::size_t>(n)] < mid) {
                    continue;
                }
                requested = true;
                all_cached *= design.cache_prob(k, n);
            }
            if (requested) {
                rate += (cuts[c + 1] - cuts[c]) * (1.0 - all_cached);
            }
        }
    }
    return rate;
}

}  // namespace cachesim::oracles
