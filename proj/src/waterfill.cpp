#include "cachesim/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cachesim/common.hpp"

namespace cachesim {

namespace {

constexpr double kLog2E2 = 1.3862943611198906;  // 2 ln 2
constexpr int kMaxIterations = 200;
constexpr double kResidualTol = 1e-12;

}  // namespace

WaterfillResult reverse_waterfill(const std::vector<double>& gains,
                                  const std::vector<double>& costs,
                                  double budget) {
    const std::size_t n = gains.size();
    if (!costs.empty() && costs.size() != n) {
        throw std::invalid_argument(
            "reverse_waterfill: gains and costs must have equal length");
    }
    WaterfillResult result;
    result.alloc.assign(n, 0.0);

    // Thresholds A_i for the active entries; inactive entries stay at zero.
    std::vector<double> threshold(n, -std::numeric_limits<double>::infinity());
    std::vector<double> cost(n, 1.0);
    bool any_active = false;
    double max_threshold = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!costs.empty()) cost[i] = costs[i];
        if (cost[i] < 0.0) {
            throw std::invalid_argument("reverse_waterfill: negative cost");
        }
        if (gains[i] > 0.0) {
            if (cost[i] == 0.0) {
                throw std::invalid_argument(
                    "reverse_waterfill: zero cost with positive gain makes the "
                    "program unbounded");
            }
            threshold[i] = std::log2(kLog2E2 * gains[i] / cost[i]);
            max_threshold = std::max(max_threshold, threshold[i]);
            any_active = true;
        }
    }
    if (!any_active || budget <= 0.0) {
        result.water_level = any_active ? max_threshold : 0.0;
        return result;
    }

    auto spend = [&](double u) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (gains[i] > 0.0) total += cost[i] * pos((threshold[i] - u) / 2.0);
        }
        return total;
    };

    // spend(u) decreases from +inf to 0 as u rises to max_threshold; expand a
    // bracket downward, then bisect.
    double hi = max_threshold;
    double step = 1.0;
    double lo = hi - step;
    while (spend(lo) < budget) {
        step *= 2.0;
        lo = hi - step;
        if (step > 1e12) break;  // unreachable for finite budgets
    }

    const double tol = kResidualTol * std::max(1.0, std::fabs(budget));
    double u = lo;
    int used = 0;
    for (int it = 0; it < kMaxIterations; ++it) {
        u = 0.5 * (lo + hi);
        ++used;
        double s = spend(u);
        if (std::fabs(s - budget) <= tol) break;
        if (s > budget) {
            lo = u;
        } else {
            hi = u;
        }
    }

    result.water_level = u;
    result.iterations = used;
    double spent = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gains[i] > 0.0) {
            result.alloc[i] = pos((threshold[i] - u) / 2.0);
            spent += cost[i] * result.alloc[i];
        }
    }
    result.spent = spent;
    return result;
}

}  // namespace cachesim
