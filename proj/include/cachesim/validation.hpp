#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/rfgcc.hpp"

namespace cachesim {

/// Outcome of one internal consistency check.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Injection points so the suite itself can be tested: a deliberately wrong
/// coverage probability or coloring must be caught.
struct ValidationHooks {
    std::function<double(std::uint32_t subset, int k, int n,
                         std::uint32_t active, const CacheDesign&)>
        label_probability_fn;  // default: production evaluator
    std::function<Coloring(const ConflictGraph&)>
        coloring_fn;  // default: label-grouped coloring
};

/// Cross-checks the solvers, bounds, and coloring machinery against the
/// independent oracles on small seeded instances.  Every check contributes
/// one CheckResult; nothing throws for a mere mismatch.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed,
                                              const ValidationHooks& hooks = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace cachesim
