#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace treedyn::verify {

struct CheckResult {
    int criterion = 0; // stable numbering of the cross-check groups
    std::string id;
    bool pass = false;
    std::string measured;
    std::string requirement;
};

struct SuiteOptions {
    std::uint64_t seed = 20250824;
    int workers = 1;
    bool full = false; // fast: reduced Monte Carlo sizes; full: pinned sizes
};

/// Runs the cross-check suite (exact formulas, oracle agreement, property
/// checks). Deterministic: output depends only on seed and `full`.
std::vector<CheckResult> run_suite(const SuiteOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);
std::string suite_csv(const std::vector<CheckResult>& results);
std::string suite_json(const std::vector<CheckResult>& results,
                       const SuiteOptions& opts);

} // namespace treedyn::verify
