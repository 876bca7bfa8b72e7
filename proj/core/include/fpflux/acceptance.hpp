#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace fpflux {

struct AcceptanceOptions {
    int threads = 1;
    std::uint64_t seed = 20250101;
    std::set<int> only;  // empty runs every criterion
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::vector<std::string> checks;  // one line per gated comparison, prefixed ok/FAIL
    std::vector<std::string> info;    // reported numbers that are not gated
    double seconds = 0.0;
};

// The twelve end-to-end criteria. Exceptions inside a criterion turn it into a failure whose
// check line carries the message; the remaining criteria still run.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &opts,
                                            const std::function<void(const CriterionResult &)> &on_result = {});

int acceptance_criterion_count();

}  // namespace fpflux
