#include "cachesim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "cachesim/ccm.hpp"
#include "cachesim/common.hpp"
#include "cachesim/lcu.hpp"
#include "cachesim/model.hpp"
#include "cachesim/oracles.hpp"
#include "cachesim/rate_bounds.hpp"
#include "cachesim/waterfill.hpp"

namespace cachesim {

namespace {

std::string format_gap(double gap, const char* context) {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific << "max |delta| = " << gap << " " << context;
    return out.str();
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

/// Random design with independent per-receiver, per-file ranges and splits.
CacheDesign random_design(SplitMix64& rng, int K, int N) {
    CacheDesign d;
    d.storing_range.assign(static_cast<std::size_t>(K),
                           std::vector<double>(static_cast<std::size_t>(N)));
    d.cache_split.assign(static_cast<std::size_t>(K),
                         std::vector<double>(static_cast<std::size_t>(N)));
    d.cache_size.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        std::vector<double> raw(static_cast<std::size_t>(N));
        double raw_sum = 0.0;
        for (int n = 0; n < N; ++n) {
            d.storing_range[k][n] = 0.2 + 1.8 * rng.next_double();
            raw[static_cast<std::size_t>(n)] = 0.05 + rng.next_double();
            raw_sum += raw[static_cast<std::size_t>(n)];
        }
        double scale = (0.2 + 0.75 * rng.next_double()) / raw_sum;
        double max_size = std::numeric_limits<double>::infinity();
        for (int n = 0; n < N; ++n) {
            d.cache_split[k][n] = raw[static_cast<std::size_t>(n)] * scale;
            max_size = std::min(max_size,
                                d.storing_range[k][n] / d.cache_split[k][n]);
        }
        d.cache_size[k] = 0.9 * rng.next_double() * max_size;
    }
    d.validate();
    return d;
}

std::vector<double> random_pmf(SplitMix64& rng, int N) {
    std::vector<double> pmf(static_cast<std::size_t>(N));
    double sum = 0.0;
    for (double& p : pmf) {
        p = 0.1 + rng.next_double();
        sum += p;
    }
    for (double& p : pmf) p /= sum;
    return pmf;
}

Demand random_demand(SplitMix64& rng, int K, int N) {
    Demand d(static_cast<std::size_t>(K));
    for (int& v : d) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
    return d;
}

NetworkInstance random_instance(SplitMix64& rng, int K, int N) {
    NetworkInstance inst;
    inst.files.resize(static_cast<std::size_t>(N));
    for (SourceFile& f : inst.files) f.variance = 0.5 + 1.5 * rng.next_double();
    inst.receivers.resize(static_cast<std::size_t>(K));
    for (Receiver& r : inst.receivers) {
        r.cache_size = 3.0 * rng.next_double();
        r.demand_pmf = random_pmf(rng, N);
    }
    inst.rate_budget = 4.0 * rng.next_double();
    inst.validate();
    return inst;
}

/// Nonempty random subset of the set bits of `mask`.
std::uint32_t random_subset(SplitMix64& rng, std::uint32_t mask) {
    std::uint32_t out = 0;
    for (std::uint32_t bit = mask; bit; bit &= bit - 1) {
        std::uint32_t low = bit & ~(bit - 1);
        if (rng.next() & 1u) out |= low;
    }
    if (!out) out = mask & ~(mask - 1);
    return out;
}

int random_member(SplitMix64& rng, std::uint32_t mask) {
    std::vector<int> members;
    for (int k = 0; k < 32; ++k)
        if ((mask >> static_cast<unsigned>(k)) & 1u) members.push_back(k);
    return members[rng.next_below(members.size())];
}

std::vector<std::vector<PacketId>> blocks_from_coloring(
    const ConflictGraph& graph, const Coloring& coloring) {
    std::vector<std::vector<PacketId>> codeword;
    codeword.reserve(coloring.classes.size());
    for (const std::vector<std::size_t>& cls : coloring.classes) {
        std::vector<PacketId> block;
        block.reserve(cls.size());
        for (std::size_t v : cls) block.push_back(graph.vertices[v].alpha);
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        codeword.push_back(std::move(block));
    }
    return codeword;
}

CheckResult check_waterfill_oracle(SplitMix64& rng) {
    CheckResult result;
    result.name = "waterfill-convex-oracle";
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(8));
        std::vector<double> gains(static_cast<std::size_t>(n));
        std::vector<double> costs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            gains[static_cast<std::size_t>(i)] =
                rng.next_double() < 0.15 ? 0.0 : std::exp2(-3.0 + 6.0 * rng.next_double());
            costs[static_cast<std::size_t>(i)] = 0.25 + 1.75 * rng.next_double();
        }
        double budget = 3.0 * rng.next_double();
        WaterfillResult wf = reverse_waterfill(gains, costs, budget);
        std::vector<double> ref =
            oracles::projected_gradient_waterfill(gains, costs, budget);
        double ours = oracles::waterfill_objective(gains, wf.alloc);
        double theirs = oracles::waterfill_objective(gains, ref);
        double gap = rel_gap(ours, theirs);
        worst = std::max(worst, gap);
        if (gap > 1e-6 || ours > theirs + 1e-6 * std::max(1.0, theirs)) ok = false;
    }
    result.passed = ok;
    result.detail = format_gap(worst, "over 10 random problems, tol 1e-6");
    return result;
}

CheckResult check_lcu_oracle(SplitMix64& rng) {
    CheckResult result;
    result.name = "lcu-convex-oracle";
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(3));
        int N = 2 + static_cast<int>(rng.next_below(4));
        NetworkInstance inst = random_instance(rng, K, N);
        LcuCacheAllocation cache = lcu_place(inst);
        for (int k = 0; k < K; ++k) {
            std::vector<double> gains(static_cast<std::size_t>(N));
            for (int n = 0; n < N; ++n)
                gains[static_cast<std::size_t>(n)] =
                    inst.receivers[static_cast<std::size_t>(k)]
                        .demand_pmf[static_cast<std::size_t>(n)] *
                    inst.files[static_cast<std::size_t>(n)].variance;
            std::vector<double> ref = oracles::projected_gradient_waterfill(
                gains, {}, inst.receivers[static_cast<std::size_t>(k)].cache_size);
            double ours = oracles::waterfill_objective(
                gains, cache.allocations[static_cast<std::size_t>(k)]);
            double theirs = oracles::waterfill_objective(gains, ref);
            double gap = rel_gap(ours, theirs);
            worst = std::max(worst, gap);
            if (gap > 1e-6) ok = false;
        }
        Demand demand = random_demand(rng, K, N);
        LcuDeliveryRates delivery =
            lcu_delivery_rates(inst, cache, demand, inst.rate_budget);
        std::vector<double> gains(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            int file = demand[static_cast<std::size_t>(k)];
            gains[static_cast<std::size_t>(k)] =
                inst.files[static_cast<std::size_t>(file)].variance *
                std::exp2(-2.0 * cache.allocations[static_cast<std::size_t>(k)]
                                     [static_cast<std::size_t>(file)]);
        }
        std::vector<double> ref =
            oracles::projected_gradient_waterfill(gains, {}, inst.rate_budget);
        double ours = oracles::waterfill_objective(gains, delivery.rates);
        double theirs = oracles::waterfill_objective(gains, ref);
        double gap = rel_gap(ours, theirs);
        worst = std::max(worst, gap);
        if (gap > 1e-6) ok = false;
    }
    result.passed = ok;
    result.detail = format_gap(worst, "cache + delivery allocations, tol 1e-6");
    return result;
}

CheckResult check_label_probability(SplitMix64& rng,
                                    const ValidationHooks& hooks) {
    CheckResult result;
    result.name = "label-probability-vs-reference";
    std::function<double(std::uint32_t, int, int, std::uint32_t,
                         const CacheDesign&)>
        fn = hooks.label_probability_fn;
    if (!fn)
        fn = [](std::uint32_t s, int k, int n, std::uint32_t a,
                const CacheDesign& d) { return label_probability(s, k, n, a, d); };
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 12; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(3));
        int N = 2 + static_cast<int>(rng.next_below(3));
        CacheDesign design = random_design(rng, K, N);
        std::uint32_t full = (1u << static_cast<unsigned>(K)) - 1u;
        for (int draw = 0; draw < 5; ++draw) {
            std::uint32_t active = random_subset(rng, full);
            std::uint32_t subset = random_subset(rng, active);
            int k = random_member(rng, subset);
            int n = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
            double ours = fn(subset, k, n, active, design);
            double ref =
                oracles::label_probability_reference(subset, k, n, active, design);
            double gap = std::abs(ours - ref);
            worst = std::max(worst, gap);
            if (gap > 1e-12) ok = false;
        }
    }
    result.passed = ok;
    result.detail = format_gap(worst, "over 60 random tuples, tol 1e-12");
    return result;
}

CheckResult check_label_bound(SplitMix64& rng) {
    CheckResult result;
    result.name = "label-bound-vs-enumeration";
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(3));
        int N = 2 + static_cast<int>(rng.next_below(3));
        CacheDesign design = random_design(rng, K, N);
        Demand demand = random_demand(rng, K, N);
        double ours = label_bound_for_demand(demand, design);
        double ref = oracles::label_bound_reference(demand, design);
        double gap = std::abs(ours - ref) / std::max(1.0, std::abs(ref));
        worst = std::max(worst, gap);
        if (gap > 1e-12) ok = false;
    }
    result.passed = ok;
    result.detail = format_gap(worst, "over 10 random designs, tol 1e-12");
    return result;
}

CheckResult check_argmax(SplitMix64& rng) {
    CheckResult result;
    result.name = "argmax-probability-vs-enumeration";
    double worst = 0.0;
    double worst_sum = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 6; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(2));
        int N = 2 + static_cast<int>(rng.next_below(2));
        CacheDesign design = random_design(rng, K, N);
        std::vector<std::vector<double>> q(static_cast<std::size_t>(K));
        for (auto& row : q) row = random_pmf(rng, N);
        std::uint32_t full = (1u << static_cast<unsigned>(K)) - 1u;
        std::uint32_t active = random_subset(rng, full);
        std::uint32_t subset = random_subset(rng, active);
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            if (!((subset >> static_cast<unsigned>(k)) & 1u)) continue;
            for (int n = 0; n < N; ++n) {
                double ours = argmax_probability(subset, k, n, active, design, q);
                double ref = oracles::argmax_probability_reference(subset, k, n,
                                                                   active, design, q);
                double gap = std::abs(ours - ref);
                worst = std::max(worst, gap);
                if (gap > 1e-12) ok = false;
                sum += ours;
            }
        }
        double sum_gap = std::abs(sum - 1.0);
        worst_sum = std::max(worst_sum, sum_gap);
        if (sum_gap > 1e-9) ok = false;
    }
    result.passed = ok;
    std::ostringstream detail;
    detail.precision(3);
    detail << std::scientific << "max |delta| = " << worst
           << ", max |sum - 1| = " << worst_sum;
    result.detail = detail.str();
    return result;
}

CheckResult check_file_symmetric(SplitMix64& rng) {
    CheckResult result;
    result.name = "file-symmetric-specialization";
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(3));
        int N = 2 + static_cast<int>(rng.next_below(4));
        std::vector<double> range(static_cast<std::size_t>(K));
        std::vector<double> split(static_cast<std::size_t>(K));
        std::vector<double> sizes(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            range[static_cast<std::size_t>(k)] = 0.2 + 1.8 * rng.next_double();
            split[static_cast<std::size_t>(k)] =
                (0.2 + 0.75 * rng.next_double()) / static_cast<double>(N);
            sizes[static_cast<std::size_t>(k)] =
                0.9 * rng.next_double() * range[static_cast<std::size_t>(k)] /
                split[static_cast<std::size_t>(k)];
        }
        CacheDesign design = file_symmetric_design(range, split, sizes, N);
        Demand demand = random_demand(rng, K, N);
        BoundResult fast = file_symmetric_rate_bound(demand, design);
        BoundResult general = demand_rate_bound(demand, design);
        if (fast.label_bound != general.label_bound ||
            fast.packet_bound != general.packet_bound)
            ok = false;
        worst = std::max(worst, std::abs(fast.label_bound - general.label_bound));
        worst = std::max(worst, std::abs(fast.packet_bound - general.packet_bound));
    }
    result.passed = ok;
    result.detail = format_gap(worst, "bitwise equality required");
    return result;
}

CheckResult check_coloring(SplitMix64& rng, const ValidationHooks& hooks) {
    CheckResult result;
    result.name = "coloring-valid-and-decodable";
    std::function<Coloring(const ConflictGraph&)> fn = hooks.coloring_fn;
    if (!fn) fn = [](const ConflictGraph& g) { return label_grouped_coloring(g); };
    bool ok = true;
    long vertices_seen = 0;
    for (int trial = 0; trial < 10 && ok; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(3));
        int N = 2 + static_cast<int>(rng.next_below(3));
        CacheDesign design = random_design(rng, K, N);
        SimParams params;
        params.T = 1.0;
        params.tau = 50.0 + static_cast<double>(rng.next_below(151));
        CacheConfiguration caches =
            random_fill_caches(design, params, rng.next());
        Demand demand = random_demand(rng, K, N);
        PacketDemand pd = packet_demand(design, caches, demand, params);
        ConflictGraph graph = build_conflict_graph(caches, pd);
        vertices_seen += static_cast<long>(graph.size());
        try {
            Coloring coloring = fn(graph);
            if (!coloring_valid(graph, coloring)) {
                ok = false;
                break;
            }
            std::vector<std::vector<PacketId>> codeword =
                blocks_from_coloring(graph, coloring);
            if (!verify_decodable(caches, pd, codeword)) ok = false;
        } catch (const std::exception&) {
            ok = false;
        }
    }
    result.passed = ok;
    result.detail = "10 random trials, " + std::to_string(vertices_seen) +
                    " vertices colored";
    return result;
}

CheckResult check_chromatic(SplitMix64& rng) {
    CheckResult result;
    result.name = "coloring-vs-chromatic-number";
    bool ok = true;
    int accepted = 0;
    long excess = 0;
    for (int attempt = 0; attempt < 200 && accepted < 8; ++attempt) {
        int K = 2 + static_cast<int>(rng.next_below(2));
        int N = 2;
        CacheDesign design = random_design(rng, K, N);
        for (auto& row : design.storing_range)
            for (double& r : row) r = std::min(r, 1.0);
        for (int k = 0; k < K; ++k) {
            double max_size = std::numeric_limits<double>::infinity();
            for (int n = 0; n < N; ++n)
                max_size = std::min(max_size, design.storing_range[k][n] /
                                                  design.cache_split[k][n]);
            design.cache_size[k] = std::min(design.cache_size[k], 0.9 * max_size);
        }
        design.validate();
        SimParams params;
        params.T = 1.0;
        params.tau = 5.0;
        CacheConfiguration caches =
            random_fill_caches(design, params, rng.next());
        Demand demand = random_demand(rng, K, N);
        PacketDemand pd = packet_demand(design, caches, demand, params);
        ConflictGraph graph = build_conflict_graph(caches, pd);
        if (graph.size() == 0 || graph.size() > 12) continue;
        ++accepted;
        int chi = oracles::exhaustive_chromatic_number(
            oracles::dense_adjacency(graph));
        Coloring grouped = label_grouped_coloring(graph);
        Coloring single = per_packet_coloring(graph);
        if (!coloring_valid(graph, grouped) || !coloring_valid(graph, single))
            ok = false;
        if (grouped.colors() < chi || single.colors() < chi) ok = false;
        excess += std::min(grouped.colors(), single.colors()) - chi;
    }
    if (accepted < 8) ok = false;
    result.passed = ok;
    result.detail = std::to_string(accepted) +
                    " small graphs, total greedy excess over optimum = " +
                    std::to_string(excess);
    return result;
}

CheckResult check_expected_bound(SplitMix64& rng) {
    CheckResult result;
    result.name = "expected-bound-vs-enumeration";
    bool ok = true;
    double worst_eq = 0.0;
    double worst_dir = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(2));
        int N = 2 + static_cast<int>(rng.next_below(2));
        NetworkInstance inst = random_instance(rng, K, N);

        // Uniform per-receiver version lengths (heterogeneous splits keep the
        // per-file cache probabilities distinct): the relaxation is tight.
        CacheDesign flat = random_design(rng, K, N);
        for (int k = 0; k < K; ++k) {
            double omega = 0.3 + 1.5 * rng.next_double();
            double max_size = std::numeric_limits<double>::infinity();
            for (int n = 0; n < N; ++n) {
                flat.storing_range[k][n] = omega;
                max_size = std::min(max_size, omega / flat.cache_split[k][n]);
            }
            flat.cache_size[k] = std::min(flat.cache_size[k], 0.9 * max_size);
        }
        flat.validate();
        double expected_flat = expected_rate_bound(inst, flat).label_bound;
        double enumerated = 0.0;
        for (const Demand& d : oracles::enumerate_demands(inst))
            enumerated +=
                oracles::demand_probability(inst, d) * label_bound_for_demand(d, flat);
        double eq_gap = rel_gap(expected_flat, enumerated);
        worst_eq = std::max(worst_eq, eq_gap);
        if (eq_gap > 1e-9) ok = false;

        // Heterogeneous version lengths: relaxation must stay an upper bound.
        CacheDesign rough = random_design(rng, K, N);
        double expected_rough = expected_rate_bound(inst, rough).label_bound;
        double enumerated_rough = 0.0;
        for (const Demand& d : oracles::enumerate_demands(inst))
            enumerated_rough +=
                oracles::demand_probability(inst, d) * label_bound_for_demand(d, rough);
        double dir_gap = enumerated_rough - expected_rough;
        worst_dir = std::max(worst_dir, dir_gap);
        if (dir_gap > 1e-9) ok = false;
    }
    result.passed = ok;
    std::ostringstream detail;
    detail.precision(3);
    detail << std::scientific << "max equality gap = " << worst_eq
           << ", max one-sided violation = " << worst_dir;
    result.detail = detail.str();
    return result;
}

CheckResult check_uniform_solver() {
    CheckResult result;
    result.name = "uniform-solver-budget-identity";
    bool ok = true;
    double worst = 0.0;
    const int K = 20;
    const int N = 100;
    const double sigma2 = 1.5;
    const double coeff =
        static_cast<double>(N) *
        (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(N), K));
    for (double M : {0.0, 50.0, 70.0}) {
        const double R = 10.0;
        UniformDesign u = solve_uniform(K, N, sigma2, M, R);
        double coded = two_group_coded_rate(static_cast<double>(N) * u.m_tilde,
                                            static_cast<double>(N), u.r_tilde,
                                            0.0, 1.0, K);
        double consumed = std::min(coded, coeff * u.r_tilde);
        double gap = std::abs(consumed - R) / std::max(1.0, R);
        worst = std::max(worst, gap);
        if (gap > 1e-6) ok = false;
        double d = sigma2 * std::exp2(-2.0 * (u.m_tilde + u.r_tilde));
        double dgap = rel_gap(d, u.expected_distortion);
        worst = std::max(worst, dgap);
        if (dgap > 1e-9) ok = false;
    }
    result.passed = ok;
    result.detail = format_gap(worst, "budget + distortion re-evaluation");
    return result;
}

CheckResult check_two_group_budget(SplitMix64& rng) {
    CheckResult result;
    result.name = "two-group-budget-recheck";
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        int K = 3 + static_cast<int>(rng.next_below(3));
        int N = 4 + static_cast<int>(rng.next_below(5));
        NetworkInstance inst;
        inst.files.resize(static_cast<std::size_t>(N));
        for (SourceFile& f : inst.files) f.variance = 0.5 + 1.5 * rng.next_double();
        std::vector<double> pmf = zipf_demand(N, 0.3 + rng.next_double());
        double shared_cache = 1.0 + 4.0 * rng.next_double();
        inst.receivers.resize(static_cast<std::size_t>(K));
        for (Receiver& r : inst.receivers) {
            r.cache_size = shared_cache;
            r.demand_pmf = pmf;
        }
        inst.rate_budget = 1.0 + 4.0 * rng.next_double();
        inst.validate();
        SearchGrid grid;
        grid.points = 11;
        grid.refinements = 1;
        TwoGroupDesign d = solve_two_group(inst, inst.rate_budget, grid);
        double closed = two_group_coded_rate(
            inst.receivers.front().cache_size, static_cast<double>(d.n_top),
            d.r1, d.r2, d.popular_mass, K);
        if (d.coded_rate > closed + 1e-9 * std::max(1.0, closed)) ok = false;
        double spend = d.coded_rate + d.uncoded_rate;
        double violation = spend - inst.rate_budget;
        worst = std::max(worst, violation);
        if (violation > 1e-6 * std::max(1.0, inst.rate_budget)) ok = false;
    }
    result.passed = ok;
    result.detail = format_gap(worst, "budget violation (<= 1e-6 allowed)");
    return result;
}

}  // namespace

std::vector<CheckResult> run_validation_suite(std::uint64_t seed,
                                              const ValidationHooks& hooks) {
    std::vector<CheckResult> results;
    {
        SplitMix64 rng(derive_seed(seed, 1));
        results.push_back(check_waterfill_oracle(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 2));
        results.push_back(check_lcu_oracle(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 3));
        results.push_back(check_label_probability(rng, hooks));
    }
    {
        SplitMix64 rng(derive_seed(seed, 4));
        results.push_back(check_label_bound(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 5));
        results.push_back(check_argmax(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 6));
        results.push_back(check_file_symmetric(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 7));
        results.push_back(check_coloring(rng, hooks));
    }
    {
        SplitMix64 rng(derive_seed(seed, 8));
        results.push_back(check_chromatic(rng));
    }
    {
        SplitMix64 rng(derive_seed(seed, 9));
        results.push_back(check_expected_bound(rng));
    }
    results.push_back(check_uniform_solver());
    {
        SplitMix64 rng(derive_seed(seed, 10));
        results.push_back(check_two_group_budget(rng));
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace cachesim
