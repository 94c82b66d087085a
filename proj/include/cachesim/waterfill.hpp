#pragma once

#include <vector>

namespace cachesim {

/// Result of a reverse water-filling allocation.
struct WaterfillResult {
    std::vector<double> alloc;  // optimal x_i >= 0
    double water_level = 0.0;   // the common threshold u = log2(lambda) at optimum
    int iterations = 0;         // bisection iterations used
    double spent = 0.0;         // sum_i cost_i * alloc_i (== budget when any gain is active)
};

/// Minimizes sum_i gain_i * 2^(-2 x_i) subject to sum_i cost_i * x_i <= budget
/// and x_i >= 0.  This is the classic reverse water-filling program: the KKT
/// conditions give x_i = max(0, (A_i - u) / 2) with A_i = log2(2 ln2 *
/// gain_i / cost_i), where the scalar u is chosen so the budget binds.  We
/// bisect on u directly in the log domain, which stays well-conditioned even
/// when the optimal multiplier underflows a double (budgets in the hundreds
/// push lambda below 2^-2000).
///
/// costs may be empty, meaning all ones.  Entries with gain_i <= 0 receive
/// x_i = 0.  A zero cost paired with a positive gain is rejected with
/// std::invalid_argument (the program would be unbounded in x_i; callers
/// never produce this).  budget <= 0 returns the all-zeros allocation.
WaterfillResult reverse_waterfill(const std::vector<double>& gains,
                                  const std::vector<double>& costs,
                                  double budget);

}  // namespace cachesim
