#include "cachesim/rate_bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "cachesim/common.hpp"

namespace cachesim {

namespace {

void check_sets(std::uint32_t subset, int k, std::uint32_t active,
                const CacheDesign& design, int n) {
    const int K = design.num_receivers();
    if (k < 0 || k >= K || n < 0 || n >= design.num_files()) {
        throw std::invalid_argument("label_probability: index out of range");
    }
    if (active >> K) {
        throw std::invalid_argument("label_probability: active set out of range");
    }
    if ((subset & ~active) != 0) {
        throw std::invalid_argument("label_probability: subset must lie inside active");
    }
    if (((subset >> static_cast<unsigned>(k)) & 1u) == 0) {
        throw std::invalid_argument("label_probability: k must belong to subset");
    }
}

/// Shared segment decomposition: receiver order sorted by depth (ties by
/// index), and the per-segment live set.
std::vector<int> depth_order(const std::vector<double>& depth) {
    std::vector<int> order(depth.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)];
    });
    return order;
}

}  // namespace

double label_probability(std::uint32_t subset, int k, int n,
                         std::uint32_t active, const CacheDesign& design) {
    check_sets(subset, k, active, design, n);
    const int K = design.num_receivers();
    double value = 1.0;
    for (int u = 0; u < K; ++u) {
        if (((active >> static_cast<unsigned>(u)) & 1u) == 0) continue;
        double p = design.cache_prob(u, n);
        if (u == k) {
            value *= 1.0 - p;
        } else if ((subset >> static_cast<unsigned>(u)) & 1u) {
            value *= p;
        } else {
            value *= 1.0 - p;
        }
    }
    return value;
}

double label_bound_for_demand(const Demand& demand, const CacheDesign& design) {
    const int K = design.num_receivers();
    if (static_cast<int>(demand.size()) != K) {
        throw std::invalid_argument("label_bound_for_demand: demand length mismatch");
    }
    if (K > kExactReceiverCap) {
        throw std::invalid_argument(
            "label_bound_for_demand: exact subset enumeration capped at " +
            std::to_string(kExactReceiverCap) +
            " receivers; use the receiver-symmetric evaluator or sampling");
    }
    std::vector<double> depth(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        int n = demand[static_cast<std::size_t>(k)];
        if (n < 0 || n >= design.num_files()) {
            throw std::invalid_argument("label_bound_for_demand: demand index out of range");
        }
        depth[static_cast<std::size_t>(k)] =
            design.storing_range[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
    }
    std::vector<int> order = depth_order(depth);

    double bound = 0.0;
    double prev = 0.0;
    for (int i = 0; i < K; ++i) {
        double cur = depth[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        double delta = cur - prev;
        prev = cur;
        if (delta <= 0.0) continue;
        std::uint32_t active = 0;
        for (int j = i; j < K; ++j) {
            active |= 1u << static_cast<unsigned>(order[static_cast<std::size_t>(j)]);
        }
        double segment = 0.0;
        for (std::uint32_t s = active; s != 0; s = (s - 1) & active) {
            double best = 0.0;
            for (int k = 0; k < K; ++k) {
                if (((s >> static_cast<unsigned>(k)) & 1u) == 0) continue;
                double lambda = label_probability(
                    s, k, demand[static_cast<std::size_t>(k)], active, design);
                if (lambda > best) best = lambda;
            }
            segment += best;
        }
        bound += delta * segment;
    }
    return bound;
}

double packet_bound_for_demand(const Demand& demand, const CacheDesign& design) {
    const int K = design.num_receivers();
    if (static_cast<int>(demand.size()) != K) {
        throw std::invalid_argument("packet_bound_for_demand: demand length mismatch");
    }
    std::map<int, std::vector<int>> requesters;
    for (int k = 0; k < K; ++k) {
        requesters[demand[static_cast<std::size_t>(k)]].push_back(k);
    }
    double bound = 0.0;
    for (const auto& [n, ks] : requesters) {
        if (n < 0 || n >= design.num_files()) {
            throw std::invalid_argument("packet_bound_for_demand: demand index out of range");
        }
        double longest = 0.0;
        double smallest_cached = 0.0;
        bool first = true;
        for (int k : ks) {
            double range = design.storing_range[static_cast<std::size_t>(k)]
                                               [static_cast<std::size_t>(n)];
            double cached = design.cached_bits(k, n);
            longest = std::max(longest, range);
            smallest_cached = first ? cached : std::min(smallest_cached, cached);
            first = false;
        }
        bound += longest - smallest_cached;
    }
    return bound;
}

BoundResult demand_rate_bound(const Demand& demand, const CacheDesign& design) {
    BoundResult result;
    result.label_bound = label_bound_for_demand(demand, design);
    result.packet_bound = packet_bound_for_demand(demand, design);
    result.value = std::min(result.label_bound, result.packet_bound);
    result.method = BoundResult::Method::kExact;
    return result;
}

double argmax_probability(std::uint32_t subset, int k, int n,
                          std::uint32_t active, const CacheDesign& design,
                          const std::vector<std::vector<double>>& q) {
    check_sets(subset, k, active, design, n);
    const int K = design.num_receivers();
    const int N = design.num_files();
    if (static_cast<int>(q.size()) != K) {
        throw std::invalid_argument("argmax_probability: q must have one row per receiver");
    }
    double v_kn = label_probability(subset, k, n, active, design);
    double result = q[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
    for (int s = 0; s < K; ++s) {
        if (s == k || ((subset >> static_cast<unsigned>(s)) & 1u) == 0) continue;
        if (static_cast<int>(q[static_cast<std::size_t>(s)].size()) != N) {
            throw std::invalid_argument("argmax_probability: q row length mismatch");
        }
        double beaten = 0.0;  // mass of s's files whose draw would outrank (k, n)
        for (int f = 0; f < N; ++f) {
            double v_sf = label_probability(subset, s, f, active, design);
            bool outranks = v_sf > v_kn || (v_sf == v_kn && s < k);
            if (outranks) beaten += q[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)];
        }
        result *= 1.0 - beaten;
    }
    return result;
}

BoundResult expected_rate_bound(const NetworkInstance& instance,
                                const CacheDesign& design) {
    const int K = design.num_receivers();
    const int N = design.num_files();
    if (instance.num_receivers() != K || instance.num_files() != N) {
        throw std::invalid_argument("expected_rate_bound: instance/design shape mismatch");
    }
    if (K > kExactReceiverCap) {
        throw std::invalid_argument(
            "expected_rate_bound: exact subset enumeration capped at " +
            std::to_string(kExactReceiverCap) +
            " receivers; use the receiver-symmetric evaluator");
    }

    // Label side: requests relaxed to each receiver's longest version.
    std::vector<double> depth(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
            depth[static_cast<std::size_t>(k)] = std::max(
                depth[static_cast<std::size_t>(k)],
                design.storing_range[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]);
        }
    }
    std::vector<int> order = depth_order(depth);

    struct Item {
        double value;
        int k;
        int n;
    };

    double label = 0.0;
    double prev = 0.0;
    for (int i = 0; i < K; ++i) {
        double cur = depth[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        double delta = cur - prev;
        prev = cur;
        if (delta <= 0.0) continue;
        std::uint32_t active = 0;
        for (int j = i; j < K; ++j) {
            active |= 1u << static_cast<unsigned>(order[static_cast<std::size_t>(j)]);
        }
        double segment = 0.0;
        for (std::uint32_t s = active; s != 0; s = (s - 1) & active) {
            // All (receiver, file) pairs of the subset, ranked by coverage
            // probability (ties toward the smaller pair), swept while
            // accumulating each receiver's already-beaten demand mass.
            std::vector<Item> items;
            items.reserve(static_cast<std::size_t>(std::popcount(s)) *
                          static_cast<std::size_t>(N));
            for (int k = 0; k < K; ++k) {
                if (((s >> static_cast<unsigned>(k)) & 1u) == 0) continue;
                for (int n = 0; n < N; ++n) {
                    items.push_back(Item{label_probability(s, k, n, active, design), k, n});
                }
            }
            std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
                if (a.value != b.value) return a.value > b.value;
                if (a.k != b.k) return a.k < b.k;
                return a.n < b.n;
            });
            std::vector<double> beaten(static_cast<std::size_t>(K), 0.0);
            for (const Item& item : items) {
                double gamma =
                    instance.receivers[static_cast<std::size_t>(item.k)]
                        .demand_pmf[static_cast<std::size_t>(item.n)];
                for (int u = 0; u < K; ++u) {
                    if (u == item.k || ((s >> static_cast<unsigned>(u)) & 1u) == 0) continue;
                    gamma *= 1.0 - beaten[static_cast<std::size_t>(u)];
                }
                segment += item.value * gamma;
                beaten[static_cast<std::size_t>(item.k)] +=
                    instance.receivers[static_cast<std::size_t>(item.k)]
                        .demand_pmf[static_cast<std::size_t>(item.n)];
            }
        }
        label += delta * segment;
    }

    // Packet side: each file weighted by the probability anyone requests it.
    double packet = 0.0;
    for (int n = 0; n < N; ++n) {
        double none = 1.0;
        double longest = 0.0;
        double smallest_cached = 0.0;
        for (int k = 0; k < K; ++k) {
            none *= 1.0 - instance.receivers[static_cast<std::size_t>(k)]
                              .demand_pmf[static_cast<std::size_t>(n)];
            double range = design.storing_range[static_cast<std::size_t>(k)]
                                               [static_cast<std::size_t>(n)];
            double cached = design.cached_bits(k, n);
            longest = std::max(longest, range);
            smallest_cached = k == 0 ? cached : std::min(smallest_cached, cached);
        }
        packet += (1.0 - none) * (longest - smallest_cached);
    }

    BoundResult result;
    result.label_bound = label;
    result.packet_bound = packet;
    result.value = std::min(label, packet);
    result.method = BoundResult::Method::kExact;
    return result;
}

BoundResult file_symmetric_rate_bound(const Demand& demand,
                                      const CacheDesign& design) {
    const int K = design.num_receivers();
    const int N = design.num_files();
    if (static_cast<int>(demand.size()) != K) {
        throw std::invalid_argument("file_symmetric_rate_bound: demand length mismatch");
    }
    if (K > kExactReceiverCap) {
        throw std::invalid_argument(
            "file_symmetric_rate_bound: exact subset enumeration capped at " +
            std::to_string(kExactReceiverCap) + " receivers");
    }
    for (int k = 0; k < K; ++k) {
        for (int n = 1; n < N; ++n) {
            if (design.storing_range[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] !=
                    design.storing_range[static_cast<std::size_t>(k)][0] ||
                design.cache_split[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] !=
                    design.cache_split[static_cast<std::size_t>(k)][0]) {
                throw std::invalid_argument(
                    "file_symmetric_rate_bound: design is not file-symmetric");
            }
        }
    }
    // Per-receiver scalars; every file shares them by the check above.
    std::vector<double> omega(static_cast<std::size_t>(K));
    std::vector<double> prob(static_cast<std::size_t>(K));
    std::vector<double> cached(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        omega[static_cast<std::size_t>(k)] =
            design.storing_range[static_cast<std::size_t>(k)][0];
        prob[static_cast<std::size_t>(k)] = design.cache_prob(k, 0);
        cached[static_cast<std::size_t>(k)] = design.cached_bits(k, 0);
    }
    std::vector<int> order = depth_order(omega);

    // Same segment/subset sweep as the general per-demand evaluator, with the
    // per-receiver scalar coverage probability inlined in the same factor
    // order, so replicated designs reproduce it bit for bit.
    double label = 0.0;
    double prev = 0.0;
    for (int i = 0; i < K; ++i) {
        double cur = omega[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        double delta = cur - prev;
        prev = cur;
        if (delta <= 0.0) continue;
        std::uint32_t active = 0;
        for (int j = i; j < K; ++j) {
            active |= 1u << static_cast<unsigned>(order[static_cast<std::size_t>(j)]);
        }
        double segment = 0.0;
        for (std::uint32_t s = active; s != 0; s = (s - 1) & active) {
            double best = 0.0;
            for (int k = 0; k < K; ++k) {
                if (((s >> static_cast<unsigned>(k)) & 1u) == 0) continue;
                double lambda = 1.0;
                for (int u = 0; u < K; ++u) {
                    if (((active >> static_cast<unsigned>(u)) & 1u) == 0) continue;
                    double p = prob[static_cast<std::size_t>(u)];
                    if (u == k) {
                        lambda *= 1.0 - p;
                    } else if ((s >> static_cast<unsigned>(u)) & 1u) {
                        lambda *= p;
                    } else {
                        lambda *= 1.0 - p;
                    }
                }
                if (lambda > best) best = lambda;
            }
            segment += best;
        }
        label += delta * segment;
    }

    // Packet side over distinct requested files, with the scalar shares.
    std::map<int, std::vector<int>> requesters;
    for (int k = 0; k < K; ++k) {
        int n = demand[static_cast<std::size_t>(k)];
        if (n < 0 || n >= N) {
            throw std::invalid_argument(
                "file_symmetric_rate_bound: demand index out of range");
        }
        requesters[n].push_back(k);
    }
    double packet = 0.0;
    for (const auto& [n, ks] : requesters) {
        (void)n;
        double longest = 0.0;
        double smallest_cached = 0.0;
        bool first = true;
        for (int k : ks) {
            longest = std::max(longest, omega[static_cast<std::size_t>(k)]);
            smallest_cached = first ? cached[static_cast<std::size_t>(k)]
                                    : std::min(smallest_cached,
                                               cached[static_cast<std::size_t>(k)]);
            first = false;
        }
        packet += longest - smallest_cached;
    }

    BoundResult result;
    result.label_bound = label;
    result.packet_bound = packet;
    result.value = std::min(label, packet);
    result.method = BoundResult::Method::kExact;
    return result;
}

WorstCaseBound file_symmetric_worst_case(const CacheDesign& design) {
    const int K = design.num_receivers();
    const int N = design.num_files();
    double demands = 1.0;
    for (int k = 0; k < K; ++k) {
        demands *= static_cast<double>(N);
        if (demands > 1e5) {
            throw std::invalid_argument(
                "file_symmetric_worst_case: demand space above 1e5");
        }
    }
    WorstCaseBound best;
    Demand d(static_cast<std::size_t>(K), 0);
    bool first = true;
    while (true) {
        BoundResult bound = file_symmetric_rate_bound(d, design);
        if (first || bound.value > best.bound.value) {
            best.bound = bound;
            best.demand = d;
            first = false;
        }
        int pos = K - 1;
        while (pos >= 0) {
            int& v = d[static_cast<std::size_t>(pos)];
            if (++v < N) break;
            v = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return best;
}

SymmetricExpectedBound receiver_symmetric_expected_bound(
    const std::vector<double>& q, double cache_size,
    const std::vector<double>& split, const std::vector<double>& storing_range,
    int num_receivers) {
    const int N = static_cast<int>(q.size());
    if (N == 0 || static_cast<int>(split.size()) != N ||
        static_cast<int>(storing_range.size()) != N) {
        throw std::invalid_argument(
            "receiver_symmetric_expected_bound: q/split/storing_range must share one length");
    }
    if (num_receivers < 1) {
        throw std::invalid_argument(
            "receiver_symmetric_expected_bound: at least one receiver");
    }
    std::vector<double> cache_prob(static_cast<std::size_t>(N), 0.0);
    for (int n = 0; n < N; ++n) {
        double range = storing_range[static_cast<std::size_t>(n)];
        if (range > 0.0) {
            cache_prob[static_cast<std::size_t>(n)] = std::min(
                1.0, split[static_cast<std::size_t>(n)] * cache_size / range);
        }
    }

    // Files sorted by version length split the depth axis into segments.
    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return storing_range[static_cast<std::size_t>(a)] <
               storing_range[static_cast<std::size_t>(b)];
    });

    SymmetricExpectedBound result;
    double label = 0.0;
    double prev = 0.0;
    for (int i = 0; i < N; ++i) {
        double cur = storing_range[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        double delta = cur - prev;
        prev = cur;
        if (delta <= 0.0) continue;
        // Receivers alive at this depth are those whose request lies in the
        // tail of files whose versions reach it.
        double tail_mass = 0.0;
        for (int j = i; j < N; ++j) {
            tail_mass += q[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        }
        double live_raw = static_cast<double>(num_receivers) * tail_mass;
        int live = tail_mass > 0.0
                       ? std::max(1, static_cast<int>(std::lround(live_raw)))
                       : 0;
        result.expected_live_receivers.push_back(live_raw);
        result.rounded_live_receivers.push_back(live);
        if (live == 0) continue;

        struct TailFile {
            int n;
            double q_tail;  // renormalized popularity within the tail
        };
        std::vector<TailFile> tail;
        tail.reserve(static_cast<std::size_t>(N - i));
        for (int j = i; j < N; ++j) {
            int n = order[static_cast<std::size_t>(j)];
            tail.push_back(TailFile{n, q[static_cast<std::size_t>(n)] / tail_mass});
        }

        double segment = 0.0;
        for (int l = 1; l <= live; ++l) {
            // Coverage probability of a size-l subset hitting file n.
            auto lambda = [&](int n) {
                double p = cache_prob[static_cast<std::size_t>(n)];
                return std::pow(p, l - 1) * std::pow(1.0 - p, live - l + 1);
            };
            std::vector<TailFile> ranked = tail;
            std::stable_sort(ranked.begin(), ranked.end(),
                             [&](const TailFile& a, const TailFile& b) {
                                 double la = lambda(a.n);
                                 double lb = lambda(b.n);
                                 if (la != lb) return la > lb;
                                 return a.n < b.n;
                             });
            double beaten = 0.0;
            double inner = 0.0;
            for (const TailFile& file : ranked) {
                double keep = 1.0 - beaten;
                double gamma = std::pow(keep, l) -
                               std::pow(std::max(0.0, keep - file.q_tail), l);
                inner += gamma * lambda(file.n);
                beaten += file.q_tail;
            }
            segment += binomial(live, l) * inner;
        }
        label += delta * segment;
    }

    double packet = 0.0;
    for (int n = 0; n < N; ++n) {
        double some_request =
            1.0 - std::pow(1.0 - q[static_cast<std::size_t>(n)], num_receivers);
        double uncovered = pos(storing_range[static_cast<std::size_t>(n)] -
                               split[static_cast<std::size_t>(n)] * cache_size);
        packet += some_request * uncovered;
    }

    result.bound.label_bound = label;
    result.bound.packet_bound = packet;
    result.bound.value = std::min(label, packet);
    result.bound.method = BoundResult::Method::kExact;
    return result;
}

double two_group_coded_rate(double cache_size, double n_top, double r1,
                            double r2, double popular_mass, int num_receivers) {
    if (num_receivers < 1 || n_top < 0.0 || r1 < 0.0 || r2 < 0.0 ||
        popular_mass < 0.0 || popular_mass > 1.0 + 1e-12 || cache_size < 0.0) {
        throw std::invalid_argument("two_group_coded_rate: argument out of range");
    }
    double uncached_term =
        static_cast<double>(num_receivers) * (1.0 - popular_mass) * r2;
    if (cache_size < 1e-9) {
        return static_cast<double>(num_receivers) * popular_mass * r1 + uncached_term;
    }
    if (r1 <= 0.0) return uncached_term;
    double coded_total = n_top * r1;
    double full = cache_size + coded_total;
    double exponent = static_cast<double>(num_receivers) * popular_mass;
    double cached_group = r1 * (full / cache_size) *
                          (1.0 - std::pow(coded_total / full, exponent));
    return cached_group + uncached_term;
}

}  // namespace cachesim
