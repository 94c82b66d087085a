#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cachesim/ccm.hpp"
#include "cachesim/design.hpp"
#include "cachesim/model.hpp"
#include "cachesim/oracles.hpp"
#include "cachesim/rate_bounds.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cachesim;

namespace {

/// Symmetric receivers with a shared Zipf demand pmf and equal variances.
NetworkInstance zipf_instance(int K, int N, double alpha, double M, double R) {
    NetworkInstance inst;
    inst.files.resize(static_cast<std::size_t>(N));
    for (SourceFile& f : inst.files) f.variance = 1.0;
    std::vector<double> pmf = zipf_demand(N, alpha);
    inst.receivers.resize(static_cast<std::size_t>(K));
    for (Receiver& r : inst.receivers) {
        r.cache_size = M;
        r.demand_pmf = pmf;
    }
    inst.rate_budget = R;
    inst.validate();
    return inst;
}

double uniform_packet_coeff(int K, int N) {
    return static_cast<double>(N) *
           (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(N), K));
}

}  // namespace

TEST_CASE("uniform solver: frozen optima for the symmetric benchmark") {
    UniformDesign u50 = solve_uniform(20, 100, 1.5, 50.0, 10.0);
    CHECK(u50.m_tilde == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u50.r_tilde == doctest::Approx(2.0132711536848547).epsilon(1e-12));
    CHECK(u50.expected_distortion ==
          doctest::Approx(0.046020491227671344).epsilon(1e-12));

    UniformDesign u70 = solve_uniform(20, 100, 1.5, 70.0, 10.0);
    CHECK(u70.m_tilde == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(u70.r_tilde == doctest::Approx(2.3256237368377697).epsilon(1e-12));
    CHECK(u70.expected_distortion ==
          doctest::Approx(0.022619565500068353).epsilon(1e-12));

    // Distortion is exactly the Gaussian rate-distortion value of the total
    // per-file rate, and the coded budget binds.
    for (const UniformDesign& u : {u50, u70}) {
        CHECK(u.expected_distortion ==
              doctest::Approx(1.5 * std::exp2(-2.0 * (u.m_tilde + u.r_tilde)))
                  .epsilon(1e-12));
        double closed = two_group_coded_rate(100.0 * u.m_tilde, 100.0,
                                             u.r_tilde, 0.0, 1.0, 20);
        double packet = uniform_packet_coeff(20, 100) * u.r_tilde;
        CHECK(std::min(closed, packet) == doctest::Approx(10.0).epsilon(1e-6));
    }
}

TEST_CASE("uniform solver: per-file accounting beats the looser printed one") {
    UniformDesign u = solve_uniform(20, 100, 1.5, 50.0, 10.0);
    // The diagnostic run lets one file absorb the whole cache, so it reports
    // a deeper prefix and a smaller distortion than the per-file share allows.
    CHECK(u.printed_m_tilde >= u.m_tilde);
    CHECK(u.printed_expected_distortion <= u.expected_distortion + 1e-15);
    CHECK(u.printed_m_tilde == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("uniform solver: degenerate budgets") {
    // No cache: the packet-side constraint binds at r = R / coefficient.
    UniformDesign u0 = solve_uniform(20, 100, 1.5, 0.0, 10.0);
    CHECK(u0.m_tilde == 0.0);
    CHECK(u0.r_tilde ==
          doctest::Approx(10.0 / uniform_packet_coeff(20, 100)).epsilon(1e-9));

    // No delivery budget: everything comes from the cache share.
    UniformDesign ur0 = solve_uniform(20, 100, 1.5, 50.0, 0.0);
    CHECK(ur0.r_tilde == 0.0);
    CHECK(ur0.m_tilde == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ur0.expected_distortion == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("uniform solver: argument validation") {
    CHECK_THROWS_AS(solve_uniform(0, 100, 1.5, 50.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_uniform(20, 0, 1.5, 50.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_uniform(20, 100, 0.0, 50.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_uniform(20, 100, 1.5, -1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_uniform(20, 100, 1.5, 50.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_uniform(20, 100, 1.5, 50.0, 10.0, 1), std::invalid_argument);
}

TEST_CASE("two-group solver: frozen optima on a steep Zipf library") {
    NetworkInstance m2 = zipf_instance(8, 24, 1.4, 2.0, 1.5);
    TwoGroupDesign t2 = solve_two_group(m2, 1.5);
    CHECK(t2.n_top == 2);
    CHECK(t2.m_tilde == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t2.r1 == doctest::Approx(0.1921875).epsilon(1e-12));
    CHECK(t2.r2 == 0.0);
    CHECK(t2.expected_distortion ==
          doctest::Approx(0.34686556172887761).epsilon(1e-12));
    CHECK(static_cast<int>(t2.top_files.size()) == t2.n_top);

    NetworkInstance m6 = zipf_instance(8, 24, 1.4, 6.0, 1.5);
    TwoGroupDesign t6 = solve_two_group(m6, 1.5);
    CHECK(t6.n_top == 3);
    CHECK(t6.m_tilde == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t6.r1 == 0.0);
    CHECK(t6.r2 == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(t6.expected_distortion ==
          doctest::Approx(0.18691621606172407).epsilon(1e-12));

    // More cache can only help.
    CHECK(t6.expected_distortion < t2.expected_distortion);

    // The residual water-filling spends the whole budget (all multicast
    // weights are positive under a Zipf pmf).
    for (const TwoGroupDesign* t : {&t2, &t6}) {
        CHECK(t->coded_rate + t->uncoded_rate ==
              doctest::Approx(1.5).epsilon(1e-9));
        CHECK(t->coded_rate >= 0.0);
        CHECK(t->uncoded_rate >= 0.0);
    }
}

TEST_CASE("two-group solver: coded budget bookkeeping matches the bound pair") {
    NetworkInstance inst = zipf_instance(8, 24, 1.4, 2.0, 1.5);
    TwoGroupDesign t = solve_two_group(inst, 1.5);
    std::vector<double> weights =
        multicast_weights(inst.receivers.front().demand_pmf, 8);
    double packet = 0.0;
    for (int n : t.top_files) packet += weights[static_cast<std::size_t>(n)] * t.r1;
    std::vector<bool> is_top(24, false);
    for (int n : t.top_files) is_top[static_cast<std::size_t>(n)] = true;
    for (int n = 0; n < 24; ++n) {
        if (!is_top[static_cast<std::size_t>(n)])
            packet += weights[static_cast<std::size_t>(n)] * t.r2;
    }
    double closed = two_group_coded_rate(2.0, static_cast<double>(t.n_top), t.r1,
                                         t.r2, t.popular_mass, 8);
    CHECK(t.coded_rate == doctest::Approx(std::min(closed, packet)).epsilon(1e-12));
}

TEST_CASE("two-group solver: refinement never worsens the distortion") {
    NetworkInstance inst = zipf_instance(8, 24, 1.4, 4.0, 1.5);
    TwoGroupDesign coarse = solve_two_group(inst, 1.5, SearchGrid{41, 0, 4});
    TwoGroupDesign fine = solve_two_group(inst, 1.5, SearchGrid{41, 2, 4});
    CHECK(fine.expected_distortion <= coarse.expected_distortion + 1e-12);
}

TEST_CASE("two-group solver matches the uniform solver on symmetric input") {
    NetworkInstance sym = zipf_instance(6, 12, 0.0, 3.0, 2.0);
    TwoGroupDesign two = solve_two_group(sym, 2.0);
    UniformDesign uni = solve_uniform(6, 12, 1.0, 3.0, 2.0);
    CHECK(two.n_top == 12);
    CHECK(two.r2 == 0.0);  // empty second group reports no rate
    CHECK(two.expected_distortion ==
          doctest::Approx(uni.expected_distortion).epsilon(0.01));
}

TEST_CASE("two-group solver: input validation") {
    NetworkInstance inst = zipf_instance(4, 6, 1.0, 2.0, 1.0);
    CHECK_THROWS_AS(solve_two_group(inst, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_two_group(inst, 1.0, SearchGrid{1, 2, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_two_group(inst, 1.0, SearchGrid{41, -1, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_two_group(inst, 1.0, SearchGrid{41, 2, 1}),
                    std::invalid_argument);

    NetworkInstance mixed_cache = inst;
    mixed_cache.receivers[0].cache_size = 3.0;
    CHECK_THROWS_AS(solve_two_group(mixed_cache, 1.0), std::invalid_argument);

    NetworkInstance mixed_pmf = inst;
    mixed_pmf.receivers[0].demand_pmf = zipf_demand(6, 0.3);
    CHECK_THROWS_AS(solve_two_group(mixed_pmf, 1.0), std::invalid_argument);
}

TEST_CASE("multicast weights: one transmission serves every requester") {
    std::vector<double> w = multicast_weights({0.5, 0.25}, 2);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.4375).epsilon(1e-12));
    std::vector<double> single = multicast_weights({0.5, 0.25}, 1);
    CHECK(single[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(single[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("uncoded residual water-filling: validation and degenerate input") {
    CHECK_THROWS_AS(uncoded_residual_waterfill({1.0, 2.0}, {0.0}, {0.5, 0.5}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(uncoded_residual_waterfill({1.0}, {0.0}, {0.5, 0.5}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(uncoded_residual_waterfill({1.0}, {0.0}, {0.5}, -0.1),
                    std::invalid_argument);
    std::vector<double> zero = uncoded_residual_waterfill(
        {2.0, 1.0, 0.5}, {0.5, 0.0, 0.25}, {0.9, 0.75, 0.5}, 0.0);
    for (double x : zero) CHECK(x == 0.0);
}

TEST_CASE("uncoded residual water-filling agrees with the gradient oracle") {
    std::vector<double> variances = {2.0, 1.0, 0.5, 1.7};
    std::vector<double> base = {0.5, 0.0, 0.25, 1.0};
    std::vector<double> weights = {0.9, 0.75, 0.5, 0.6};
    const double residual = 1.2;
    std::vector<double> alloc =
        uncoded_residual_waterfill(variances, base, weights, residual);

    std::vector<double> gains(variances.size());
    for (std::size_t n = 0; n < variances.size(); ++n) {
        gains[n] = weights[n] * variances[n] * std::exp2(-2.0 * base[n]);
    }
    std::vector<double> ref =
        oracles::projected_gradient_waterfill(gains, weights, residual);
    double got = oracles::waterfill_objective(gains, alloc);
    double want = oracles::waterfill_objective(gains, ref);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
    double spent = 0.0;
    for (std::size_t n = 0; n < alloc.size(); ++n) spent += weights[n] * alloc[n];
    CHECK(spent == doctest::Approx(residual).epsilon(1e-9));
}

TEST_CASE("two-group solution lifts to a packet-level caching design") {
    NetworkInstance inst = zipf_instance(8, 24, 1.4, 2.0, 1.5);
    TwoGroupDesign t = solve_two_group(inst, 1.5);
    CacheDesign d = to_cache_design(t, 8, 24, 2.0);
    d.validate();
    REQUIRE(d.num_receivers() == 8);
    REQUIRE(d.num_files() == 24);
    std::vector<bool> is_top(24, false);
    for (int n : t.top_files) is_top[static_cast<std::size_t>(n)] = true;
    for (int k = 0; k < 8; ++k) {
        CHECK(d.cache_size[static_cast<std::size_t>(k)] == 2.0);
        for (int n = 0; n < 24; ++n) {
            if (is_top[static_cast<std::size_t>(n)]) {
                CHECK(d.storing_range[k][n] ==
                      doctest::Approx(t.m_tilde + t.r1).epsilon(1e-12));
                CHECK(d.cache_split[k][n] ==
                      doctest::Approx(1.0 / t.n_top).epsilon(1e-12));
            } else {
                CHECK(d.storing_range[k][n] == doctest::Approx(t.r2).epsilon(1e-12));
                CHECK(d.cache_split[k][n] == 0.0);
            }
        }
    }
}

TEST_CASE("coded-scheme curve: uniform dispatch with frozen rows") {
    NetworkInstance inst = zipf_instance(20, 100, 0.0, 0.0, 0.0);
    for (SourceFile& f : inst.files) f.variance = 1.5;
    std::vector<TradeoffPoint> rows =
        ccm_distortion_curve(inst, {50.0, 70.0}, {10.0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].scheme == Scheme::kCcm);
    CHECK(rows[0].cache_size == 50.0);
    CHECK(rows[0].rate_budget == 10.0);
    CHECK(rows[0].coded_rate == 10.0);
    CHECK(rows[0].uncoded_rate == 0.0);
    CHECK(rows[0].has_design_diagnostics);
    CHECK(rows[0].n_top == 100.0);
    CHECK(rows[0].r1 == doctest::Approx(2.0132711536848547).epsilon(1e-12));
    CHECK(rows[0].r2 == 0.0);
    CHECK(rows[0].expected_distortion ==
          doctest::Approx(0.046020491227671344).epsilon(1e-12));
    CHECK(rows[1].expected_distortion ==
          doctest::Approx(0.022619565500068353).epsilon(1e-12));
    CHECK(rows[1].expected_distortion < rows[0].expected_distortion);
}

TEST_CASE("coded-scheme curve: two-group dispatch mirrors the solver") {
    NetworkInstance inst = zipf_instance(8, 24, 1.4, 0.0, 0.0);
    std::vector<TradeoffPoint> rows =
        ccm_distortion_curve(inst, {2.0, 6.0}, {1.5});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n_top == 2.0);
    CHECK(rows[0].expected_distortion ==
          doctest::Approx(0.34686556172887761).epsilon(1e-12));
    CHECK(rows[1].n_top == 3.0);
    CHECK(rows[1].r1 == 0.0);
    CHECK(rows[1].r2 == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(rows[1].expected_distortion ==
          doctest::Approx(0.18691621606172407).epsilon(1e-12));
    for (const TradeoffPoint& row : rows) {
        CHECK(row.scheme == Scheme::kCcm);
        CHECK(row.has_design_diagnostics);
        CHECK(row.coded_rate + row.uncoded_rate ==
              doctest::Approx(1.5).epsilon(1e-9));
    }
}

TEST_CASE("coded-scheme curve: distortion is monotone along both axes") {
    NetworkInstance inst = zipf_instance(6, 12, 0.0, 0.0, 0.0);
    std::vector<TradeoffPoint> rows =
        ccm_distortion_curve(inst, {1.0, 3.0, 6.0}, {0.5, 1.5, 3.0});
    REQUIRE(rows.size() == 9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const TradeoffPoint& p = rows[static_cast<std::size_t>(3 * i + j)];
            if (j > 0) {
                CHECK(p.expected_distortion <=
                      rows[static_cast<std::size_t>(3 * i + j - 1)].expected_distortion +
                          1e-12);
            }
            if (i > 0) {
                CHECK(p.expected_distortion <=
                      rows[static_cast<std::size_t>(3 * (i - 1) + j)].expected_distortion +
                          1e-12);
            }
        }
    }
}
