#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cachesim/common.hpp"
#include "cachesim/lcu.hpp"
#include "cachesim/model.hpp"
#include "cachesim/oracles.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cachesim;

namespace {

NetworkInstance uniform_instance(int K, int N, double sigma2, double M,
                                 double R) {
    NetworkInstance inst;
    inst.files.assign(static_cast<std::size_t>(N), SourceFile{sigma2});
    inst.receivers.assign(
        static_cast<std::size_t>(K),
        Receiver{M, std::vector<double>(static_cast<std::size_t>(N),
                                        1.0 / static_cast<double>(N))});
    inst.rate_budget = R;
    return inst;
}

}  // namespace

TEST_CASE("uniform symmetric closed form sigma^2 * 2^(-2(M/N + R/K))") {
    // Flat demands and equal variances: every file gets M/N cache and every
    // receiver R/K delivery, independent of the demand realization.
    NetworkInstance inst = uniform_instance(20, 100, 1.5, 50.0, 10.0);
    double d = lcu_expected_distortion(inst, 64, 1);
    CHECK(d == doctest::Approx(0.375).epsilon(1e-9));

    inst = uniform_instance(20, 100, 1.5, 70.0, 10.0);
    d = lcu_expected_distortion(inst, 64, 1);
    CHECK(d == doctest::Approx(1.5 * std::exp2(-2.4)).epsilon(1e-9));

    for (double M : {0.0, 12.5, 33.0}) {
        for (double R : {0.0, 4.0, 9.0}) {
            inst = uniform_instance(5, 10, 2.0, M, R);
            d = lcu_expected_distortion(inst, 64, 1);
            double closed = 2.0 * std::exp2(-2.0 * (M / 10.0 + R / 5.0));
            CHECK(d == doctest::Approx(closed).epsilon(1e-9));
        }
    }
}

TEST_CASE("cache placement spends the cache and matches the oracle") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        NetworkInstance inst = testutil::random_instance(
            rng, 2 + static_cast<int>(rng.next_below(4)),
            2 + static_cast<int>(rng.next_below(6)));
        LcuCacheAllocation cache = lcu_place(inst);
        REQUIRE(cache.allocations.size() == inst.receivers.size());
        for (std::size_t k = 0; k < inst.receivers.size(); ++k) {
            double spent = 0.0;
            std::vector<double> gains(inst.files.size());
            for (std::size_t n = 0; n < inst.files.size(); ++n) {
                spent += cache.allocations[k][n];
                gains[n] = inst.receivers[k].demand_pmf[n] * inst.files[n].variance;
            }
            CHECK(spent ==
                  doctest::Approx(inst.receivers[k].cache_size).epsilon(1e-9));
            std::vector<double> ref = oracles::projected_gradient_waterfill(
                gains, {}, inst.receivers[k].cache_size);
            CHECK(oracles::waterfill_objective(gains, cache.allocations[k]) ==
                  doctest::Approx(oracles::waterfill_objective(gains, ref))
                      .epsilon(1e-6));
        }
    }
}

TEST_CASE("delivery spends the rate budget on requested files") {
    SplitMix64 rng(32);
    NetworkInstance inst = testutil::random_instance(rng, 4, 5);
    LcuCacheAllocation cache = lcu_place(inst);
    Demand demand = {1, 4, 0, 4};
    LcuDeliveryRates delivery =
        lcu_delivery_rates(inst, cache, demand, inst.rate_budget);
    double spent = 0.0;
    for (double r : delivery.rates) {
        CHECK(r >= 0.0);
        spent += r;
    }
    CHECK(spent == doctest::Approx(inst.rate_budget).epsilon(1e-9));

    // The receiver with the weakest cached description of its request gets
    // at least as much delivery rate as a symmetric peer with a stronger one.
    std::vector<double> gains(4);
    for (int k = 0; k < 4; ++k)
        gains[static_cast<std::size_t>(k)] =
            inst.files[static_cast<std::size_t>(demand[static_cast<std::size_t>(k)])]
                .variance *
            std::exp2(-2.0 * cache.allocations[static_cast<std::size_t>(k)]
                                 [static_cast<std::size_t>(
                                     demand[static_cast<std::size_t>(k)])]);
    std::vector<double> ref =
        oracles::projected_gradient_waterfill(gains, {}, inst.rate_budget);
    CHECK(oracles::waterfill_objective(gains, delivery.rates) ==
          doctest::Approx(oracles::waterfill_objective(gains, ref)).epsilon(1e-6));
}

TEST_CASE("delivery input validation") {
    NetworkInstance inst = uniform_instance(2, 3, 1.0, 1.0, 1.0);
    LcuCacheAllocation cache = lcu_place(inst);
    CHECK_THROWS_AS(lcu_delivery_rates(inst, cache, {0}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lcu_delivery_rates(inst, cache, {0, 3}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lcu_delivery_rates(inst, cache, {0, -1}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lcu_delivery_rates(inst, cache, {0, 1}, -0.1),
                    std::invalid_argument);
}

TEST_CASE("expected distortion is monotone in cache and rate") {
    SplitMix64 rng(33);
    NetworkInstance inst = testutil::random_instance(rng, 3, 4);
    std::vector<double> cache_sizes = {0.0, 0.5, 1.5, 3.0};
    std::vector<double> budgets = {0.0, 1.0, 2.5};
    std::vector<TradeoffPoint> curve =
        lcu_distortion_curve(inst, cache_sizes, budgets, 400, 5);
    REQUIRE(curve.size() == cache_sizes.size() * budgets.size());
    for (const TradeoffPoint& p : curve) {
        CHECK(p.scheme == Scheme::kLcu);
        CHECK(p.coded_rate == 0.0);
        CHECK(p.uncoded_rate == doctest::Approx(p.rate_budget));
        CHECK_FALSE(p.has_design_diagnostics);
    }
    // More budget at the same cache never hurts (same demand stream per row
    // would be ideal; exact enumeration holds here since 4^3 = 64 demands).
    for (std::size_t m = 0; m < cache_sizes.size(); ++m) {
        for (std::size_t r = 1; r < budgets.size(); ++r) {
            const TradeoffPoint& lo = curve[m * budgets.size() + r - 1];
            const TradeoffPoint& hi = curve[m * budgets.size() + r];
            CHECK(hi.expected_distortion <= lo.expected_distortion + 1e-12);
        }
    }
    for (std::size_t r = 0; r < budgets.size(); ++r) {
        for (std::size_t m = 1; m < cache_sizes.size(); ++m) {
            const TradeoffPoint& lo = curve[(m - 1) * budgets.size() + r];
            const TradeoffPoint& hi = curve[m * budgets.size() + r];
            CHECK(hi.expected_distortion <= lo.expected_distortion + 1e-12);
        }
    }
}

TEST_CASE("curve evaluation is deterministic in the seed") {
    SplitMix64 rng(34);
    NetworkInstance inst = testutil::random_instance(rng, 7, 9);  // MC path
    std::vector<TradeoffPoint> a =
        lcu_distortion_curve(inst, {1.0, 2.0}, {0.5, 1.5}, 200, 99);
    std::vector<TradeoffPoint> b =
        lcu_distortion_curve(inst, {1.0, 2.0}, {0.5, 1.5}, 200, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].expected_distortion == b[i].expected_distortion);
}

TEST_CASE("cache placement validates inputs") {
    NetworkInstance inst = uniform_instance(2, 3, 1.0, 1.0, 1.0);
    inst.receivers[0].demand_pmf = {0.5, 0.5};  // wrong length
    CHECK_THROWS_AS(lcu_cache_allocation(inst.receivers[0], inst.files),
                    std::invalid_argument);
}
