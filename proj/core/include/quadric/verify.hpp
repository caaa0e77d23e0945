// verify.hpp — the acceptance suite: oracle-equivalence and property checks
// that certify the evaluators against the closed forms, the heat kernel
// bridge, and the linear-algebra invariants. Each check runs standalone and
// reports pass/fail with a one-line diagnostic; tolerances are fixed here.

#pragma once

#include <string>
#include <vector>

namespace quadric {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int threads = 0;  // 0: hardware concurrency
};

// Stable check names, in suite order.
std::vector<std::string> acceptance_names();

CheckResult run_acceptance_check(const std::string& name, const AcceptanceOptions& opt = {});

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace quadric
