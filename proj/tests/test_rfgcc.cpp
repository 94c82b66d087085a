#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "cachesim/common.hpp"
#include "cachesim/oracles.hpp"
#include "cachesim/rfgcc.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cachesim;

namespace {

SimParams params_of(double tau, double T, std::uint64_t seed = 0) {
    SimParams p;
    p.tau = tau;
    p.T = T;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("packet counting rounds to nearest with ties upward") {
    SimParams p = params_of(1000.0, 1.0);
    CHECK(packet_count(1.0, p) == 1000);
    CHECK(packet_count(0.0005, p) == 1);    // 0.5 packets -> 1
    CHECK(packet_count(0.00049, p) == 0);   // 0.49 packets -> 0
    CHECK(packet_count(0.0015, p) == 2);    // 1.5 packets -> 2
    CHECK(packet_count(0.0, p) == 0);
    CHECK(packet_count(-1.0, p) == 0);

    SimParams coarse = params_of(10.0, 4.0);
    CHECK(packet_count(2.0, coarse) == 5);

    SimParams bad = params_of(1.0, 2.0);
    CHECK_THROWS_AS(packet_count(1.0, bad), std::invalid_argument);
}

TEST_CASE("cache fill draws the right number of distinct sorted positions") {
    SplitMix64 rng(17);
    CacheDesign design = testutil::random_design(rng, 4, 3);
    SimParams p = params_of(500.0, 1.0);
    CacheConfiguration caches = random_fill_caches(design, p, 99);
    REQUIRE(caches.positions.size() == 4);
    for (int k = 0; k < 4; ++k) {
        REQUIRE(caches.positions[k].size() == 3);
        for (int n = 0; n < 3; ++n) {
            const std::vector<long>& pos = caches.positions[k][n];
            long version = packet_count(design.storing_range[k][n], p);
            long want = std::min(packet_count(design.cached_bits(k, n), p), version);
            CHECK(static_cast<long>(pos.size()) == want);
            CHECK(std::is_sorted(pos.begin(), pos.end()));
            CHECK(std::set<long>(pos.begin(), pos.end()).size() == pos.size());
            for (long q : pos) {
                CHECK(q >= 1);
                CHECK(q <= version);
            }
            for (long q = 1; q <= version; ++q)
                CHECK(caches.holds(k, n, q) ==
                      std::binary_search(pos.begin(), pos.end(), q));
        }
    }
    // Deterministic in the seed, and different seeds differ somewhere.
    CacheConfiguration again = random_fill_caches(design, p, 99);
    CHECK(again.positions == caches.positions);
    CacheConfiguration other = random_fill_caches(design, p, 100);
    CHECK(other.positions != caches.positions);
}

TEST_CASE("cache fill rejects designs that cache beyond their range") {
    CacheDesign design;
    design.storing_range = {{1.0}};
    design.cache_split = {{1.0}};
    design.cache_size = {2.0};  // asks for 2.0 cached bits of a 1.0 range
    CHECK_THROWS_AS(random_fill_caches(design, params_of(100.0, 1.0), 0),
                    infeasible_error);
}

TEST_CASE("packet demand lists exactly the uncached positions") {
    CacheDesign design;
    design.storing_range = {{0.004, 0.002}, {0.003, 0.005}};
    design.cache_split = {{0.5, 0.5}, {0.5, 0.5}};
    design.cache_size = {0.004, 0.004};
    SimParams p = params_of(1000.0, 1.0);
    CacheConfiguration caches = random_fill_caches(design, p, 7);
    PacketDemand pd = packet_demand(design, caches, {0, 1}, p);
    REQUIRE(pd.missing.size() == 2);
    for (int k = 0; k < 2; ++k) {
        int file = pd.demand[k];
        long version = packet_count(design.storing_range[k][file], p);
        std::vector<long> expect;
        for (long q = 1; q <= version; ++q)
            if (!caches.holds(k, file, q)) expect.push_back(q);
        CHECK(pd.missing[k] == expect);
    }
}

TEST_CASE("two receivers holding each other's packet share one color") {
    CacheConfiguration caches;
    caches.positions = {{{1}}, {{2}}};  // r0 holds (f0,p1); r1 holds (f0,p2)
    PacketDemand pd;
    pd.demand = {0, 0};
    pd.missing = {{2}, {1}};
    ConflictGraph graph = build_conflict_graph(caches, pd);
    REQUIRE(graph.size() == 2);
    CHECK(graph.vertices[0].beta == 0);
    CHECK(graph.vertices[0].alpha == PacketId{0, 2});
    CHECK(graph.vertices[0].eta == 0b10u);
    CHECK(graph.vertices[1].beta == 1);
    CHECK(graph.vertices[1].alpha == PacketId{0, 1});
    CHECK(graph.vertices[1].eta == 0b01u);
    CHECK_FALSE(graph.adjacent(0, 1));
    CHECK(graph.vertices[0].label() == graph.vertices[1].label());

    Coloring grouped = label_grouped_coloring(graph);
    CHECK(grouped.colors() == 1);
    Coloring single = per_packet_coloring(graph);
    CHECK(single.colors() == 2);
    CHECK(coloring_valid(graph, grouped));
    CHECK(coloring_valid(graph, single));

    SimParams p = params_of(100.0, 1.0);
    DeliveryResult delivery = gcc_delivery(caches, pd, p);
    CHECK(delivery.label_grouped_colors == 1);
    CHECK(delivery.per_packet_colors == 2);
    CHECK(delivery.coloring.colors() == 1);
    CHECK(delivery.rate == doctest::Approx(1.0 / 100.0));
    REQUIRE(delivery.codeword.size() == 1);
    CHECK(delivery.codeword[0] ==
          std::vector<PacketId>{PacketId{0, 1}, PacketId{0, 2}});
    CHECK(verify_decodable(caches, pd, delivery.codeword));
}

TEST_CASE("adjacency needs mutual side information") {
    CacheConfiguration caches;
    caches.positions = {{{}}, {{2}}};  // r0 holds nothing, r1 holds (f0,p2)
    PacketDemand pd;
    pd.demand = {0, 0};
    pd.missing = {{1, 2}, {1}};
    ConflictGraph graph = build_conflict_graph(caches, pd);
    // Vertices: (p1,b0), (p2,b0), (p1,b1) in receiver-major order.
    REQUIRE(graph.size() == 3);
    CHECK(graph.adjacent(0, 1));        // distinct packets, r0 caches neither
    CHECK_FALSE(graph.adjacent(0, 2));  // same packet p1
    CHECK(graph.adjacent(1, 2));        // one-sided: r1 holds p2, r0 lacks p1

    Coloring bad;
    bad.classes = {{0, 1}, {2}};
    CHECK_FALSE(coloring_valid(graph, bad));

    Coloring good;
    good.classes = {{0, 2}, {1}};  // same-packet vertices may share
    CHECK(coloring_valid(graph, good));

    Coloring missing_vertex;
    missing_vertex.classes = {{0}, {1}};
    CHECK_FALSE(coloring_valid(graph, missing_vertex));

    Coloring duplicated;
    duplicated.classes = {{0, 2}, {1}, {0}};
    CHECK_FALSE(coloring_valid(graph, duplicated));
}

TEST_CASE("decodability is a real witness, not a tautology") {
    CacheConfiguration caches;
    caches.positions = {{{1}}, {{2}}};
    PacketDemand pd;
    pd.demand = {0, 0};
    pd.missing = {{2}, {1}};
    std::vector<std::vector<PacketId>> coded = {
        {PacketId{0, 1}, PacketId{0, 2}}};
    CHECK(verify_decodable(caches, pd, coded));
    std::vector<std::vector<PacketId>> uncoded = {{PacketId{0, 1}},
                                                  {PacketId{0, 2}}};
    CHECK(verify_decodable(caches, pd, uncoded));
    std::vector<std::vector<PacketId>> short_one = {{PacketId{0, 1}}};
    CHECK_FALSE(verify_decodable(caches, pd, short_one));
    // A block XORing two packets neither receiver can peel is useless.
    CacheConfiguration empty;
    empty.positions = {{{}}, {{}}};
    CHECK_FALSE(verify_decodable(empty, pd, coded));
}

TEST_CASE("label-grouped classes never split a label across queues unfairly") {
    // Three receivers all caching each other's packets pairwise for one file:
    // every vertex shares the full label and the group contributes exactly
    // max-queue-length colors.
    CacheConfiguration caches;
    caches.positions = {{{2, 3}}, {{1, 3}}, {{1, 2}}};
    PacketDemand pd;
    pd.demand = {0, 0, 0};
    pd.missing = {{1}, {2}, {3}};
    ConflictGraph graph = build_conflict_graph(caches, pd);
    REQUIRE(graph.size() == 3);
    Coloring grouped = label_grouped_coloring(graph);
    CHECK(grouped.colors() == 1);
    CHECK(coloring_valid(graph, grouped));
}

TEST_CASE("full trial pipeline is deterministic and decodable") {
    SplitMix64 rng(55);
    CacheDesign design = testutil::random_design(rng, 5, 3);
    SimParams p = params_of(400.0, 1.0);
    Demand demand = testutil::random_demand(rng, 5, 3);
    TrialResult a = run_delivery_trial(design, p, demand, 1234);
    TrialResult b = run_delivery_trial(design, p, demand, 1234);
    CHECK(a.rate == b.rate);
    CHECK(a.vertices == b.vertices);
    CHECK(a.label_grouped_colors == b.label_grouped_colors);
    CHECK(a.per_packet_colors == b.per_packet_colors);
    CHECK(a.decodable);
    CHECK(a.rate ==
          doctest::Approx(static_cast<double>(std::min(
                              a.label_grouped_colors, a.per_packet_colors)) /
                          400.0));
}

TEST_CASE("random trials: colorings valid, codewords decodable") {
    SplitMix64 rng(56);
    for (int trial = 0; trial < 200; ++trial) {
        int K = 2 + static_cast<int>(rng.next_below(5));
        int N = 2 + static_cast<int>(rng.next_below(3));
        CacheDesign design = testutil::random_design(rng, K, N);
        SimParams p = params_of(
            std::exp(rng.next_double() * std::log(800.0)) + 1.0, 1.0);
        CacheConfiguration caches = random_fill_caches(design, p, rng.next());
        Demand demand = testutil::random_demand(rng, K, N);
        PacketDemand pd = packet_demand(design, caches, demand, p);
        ConflictGraph graph = build_conflict_graph(caches, pd);
        Coloring grouped = label_grouped_coloring(graph);
        Coloring single = per_packet_coloring(graph);
        REQUIRE(coloring_valid(graph, grouped));
        REQUIRE(coloring_valid(graph, single));
        CHECK(grouped.colors() <= static_cast<long>(graph.size()));
        DeliveryResult delivery = gcc_delivery(caches, pd, p);
        CHECK(delivery.coloring.colors() ==
              std::min(grouped.colors(), single.colors()));
        REQUIRE(verify_decodable(caches, pd, delivery.codeword));
    }
}

TEST_CASE("greedy colorings are optimal-or-worse, never better than chromatic") {
    SplitMix64 rng(57);
    int checked = 0;
    for (int attempt = 0; attempt < 300 && checked < 12; ++attempt) {
        CacheDesign design = testutil::random_design(rng, 3, 2);
        SimParams p = params_of(6.0, 1.0);
        CacheConfiguration caches = random_fill_caches(design, p, rng.next());
        Demand demand = testutil::random_demand(rng, 3, 2);
        PacketDemand pd = packet_demand(design, caches, demand, p);
        ConflictGraph graph = build_conflict_graph(caches, pd);
        if (graph.size() == 0 || graph.size() > 12) continue;
        ++checked;
        int chi = oracles::exhaustive_chromatic_number(
            oracles::dense_adjacency(graph));
        CHECK(label_grouped_coloring(graph).colors() >= chi);
        CHECK(per_packet_coloring(graph).colors() >= chi);
    }
    CHECK(checked == 12);
}

TEST_CASE("simulated rates approach the infinite-resolution coloring limits") {
    SplitMix64 rng(58);
    CacheDesign design = testutil::random_design(rng, 4, 3);
    Demand demand = testutil::random_demand(rng, 4, 3);
    double grouped_limit = oracles::label_grouped_rate_limit(demand, design);
    double single_limit = oracles::per_packet_rate_limit(demand, design);
    SimParams p = params_of(20000.0, 1.0);
    double grouped_mean = 0.0;
    double single_mean = 0.0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        CacheConfiguration caches =
            random_fill_caches(design, p, derive_seed(4242, t));
        PacketDemand pd = packet_demand(design, caches, demand, p);
        ConflictGraph graph = build_conflict_graph(caches, pd);
        grouped_mean += static_cast<double>(label_grouped_coloring(graph).colors()) /
                        p.packets_per_unit_rate();
        single_mean += static_cast<double>(per_packet_coloring(graph).colors()) /
                       p.packets_per_unit_rate();
    }
    grouped_mean /= trials;
    single_mean /= trials;
    CHECK(std::abs(grouped_mean - grouped_limit) <= 0.02);
    CHECK(std::abs(single_mean - single_limit) <= 0.02);
}
