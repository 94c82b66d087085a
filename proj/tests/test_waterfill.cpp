#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cachesim/common.hpp"
#include "cachesim/oracles.hpp"
#include "cachesim/waterfill.hpp"
#include "doctest.h"

using namespace cachesim;

namespace {
constexpr double kLog2E2 = 1.3862943611198906;  // 2 ln 2

double threshold(double gain, double cost) {
    return std::log2(kLog2E2 * gain / cost);
}
}  // namespace

TEST_CASE("equal gains split the budget evenly") {
    WaterfillResult r = reverse_waterfill({1.5, 1.5, 1.5, 1.5}, {}, 2.0);
    for (double x : r.alloc) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.spent == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("budget is spent exactly when any gain is positive") {
    std::vector<double> gains = {2.0, 0.5, 0.05, 1.0};
    std::vector<double> costs = {1.0, 2.0, 0.5, 1.5};
    for (double budget : {0.3, 1.0, 5.0, 40.0}) {
        WaterfillResult r = reverse_waterfill(gains, costs, budget);
        double spent = 0.0;
        for (std::size_t i = 0; i < gains.size(); ++i)
            spent += costs[i] * r.alloc[i];
        CHECK(spent == doctest::Approx(budget).epsilon(1e-12));
        CHECK(r.spent == doctest::Approx(spent).epsilon(1e-12));
    }
}

TEST_CASE("KKT structure: common water level and zero set") {
    std::vector<double> gains = {2.0, 0.5, 0.001, 1.0, 0.0};
    std::vector<double> costs = {1.0, 2.0, 1.0, 1.5, 1.0};
    WaterfillResult r = reverse_waterfill(gains, costs, 0.8);
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (gains[i] <= 0.0) {
            CHECK(r.alloc[i] == 0.0);
            continue;
        }
        double t = threshold(gains[i], costs[i]);
        if (r.alloc[i] > 0.0) {
            // Active: marginal value sits on the water level.
            CHECK(t - 2.0 * r.alloc[i] == doctest::Approx(r.water_level).epsilon(1e-8));
        } else {
            // Inactive: already below the water level.
            CHECK(t <= r.water_level + 1e-8);
        }
    }
}

TEST_CASE("single positive gain takes everything") {
    WaterfillResult r = reverse_waterfill({0.0, 3.0, 0.0}, {1.0, 2.0, 1.0}, 1.0);
    CHECK(r.alloc[0] == 0.0);
    CHECK(r.alloc[2] == 0.0);
    CHECK(r.alloc[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate inputs") {
    WaterfillResult zero = reverse_waterfill({1.0, 2.0}, {}, 0.0);
    CHECK(zero.alloc[0] == 0.0);
    CHECK(zero.alloc[1] == 0.0);

    WaterfillResult none = reverse_waterfill({0.0, 0.0}, {}, 5.0);
    CHECK(none.alloc[0] == 0.0);
    CHECK(none.alloc[1] == 0.0);
    CHECK(none.spent == 0.0);

    CHECK_THROWS_AS(reverse_waterfill({1.0}, {0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(reverse_waterfill({1.0}, {1.0, 1.0}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("matches the projected-gradient oracle on random problems") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(8));
        std::vector<double> gains(static_cast<std::size_t>(n));
        std::vector<double> costs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            gains[static_cast<std::size_t>(i)] =
                rng.next_double() < 0.2 ? 0.0
                                        : std::exp2(-3.0 + 6.0 * rng.next_double());
            costs[static_cast<std::size_t>(i)] = 0.25 + 1.75 * rng.next_double();
        }
        double budget = 3.0 * rng.next_double();
        WaterfillResult wf = reverse_waterfill(gains, costs, budget);
        std::vector<double> ref =
            oracles::projected_gradient_waterfill(gains, costs, budget);
        double ours = oracles::waterfill_objective(gains, wf.alloc);
        double theirs = oracles::waterfill_objective(gains, ref);
        CHECK(std::abs(ours - theirs) <= 1e-6 * std::max(1.0, theirs));
    }
}

TEST_CASE("objective is non-increasing in the budget") {
    std::vector<double> gains = {1.7, 0.3, 0.9};
    double prev = oracles::waterfill_objective(gains, {0, 0, 0});
    for (double budget = 0.25; budget <= 4.0; budget += 0.25) {
        WaterfillResult r = reverse_waterfill(gains, {}, budget);
        double obj = oracles::waterfill_objective(gains, r.alloc);
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}

TEST_CASE("water level reported consistently with the allocation") {
    std::vector<double> gains = {2.0, 1.0, 0.25};
    WaterfillResult r = reverse_waterfill(gains, {}, 3.0);
    // Reconstruct allocations from the reported level.
    for (std::size_t i = 0; i < gains.size(); ++i) {
        double x = std::max(0.0, (threshold(gains[i], 1.0) - r.water_level) / 2.0);
        CHECK(x == doctest::Approx(r.alloc[i]).epsilon(1e-9));
    }
}
