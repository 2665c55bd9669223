#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cns {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::string scratch_dir;   ///< run artifacts go below this directory
    std::vector<int> only;     ///< empty = all criteria
    int workers = 0;           ///< sweep concurrency
};

inline constexpr int kCriterionCount = 14;

/// Runs the acceptance criteria in order, reporting each result as it
/// completes. The nonnegativity criterion (3) is evaluated last over every
/// simulation the other criteria ran.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  nonnegativity of n: ..." style single line.
std::string format_result(const CriterionResult& r);

} // namespace cns
