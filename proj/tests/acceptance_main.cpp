// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. Runtime budgets are part of the criteria.

#include <cstdio>
#include <cstring>
#include <map>
#include <string>

#include "quadric/verify.hpp"

int main(int argc, char** argv) {
    using quadric::CheckResult;

    const std::map<std::string, double> budget_seconds = {
        {"heisenberg-closed-form", 10.0},  {"m2-power-law", 60.0},
        {"product-heisenberg-szego", 5.0}, {"m3-cross-parameterization", 120.0},
        {"classification-table", 5.0},     {"heat-pde-residual", 60.0},
        {"heat-to-green-bridge", 30.0},    {"mass-identity", 60.0},
        {"homogeneity", 300.0},            {"linear-algebra-invariants", 10.0},
    };

    std::vector<std::string> names;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) names.emplace_back(argv[i]);
    } else {
        names = quadric::acceptance_names();
    }

    int failures = 0;
    int index = 0;
    for (const std::string& name : names) {
        ++index;
        const CheckResult r = quadric::run_acceptance_check(name);
        const auto it = budget_seconds.find(name);
        const double budget = (it != budget_seconds.end()) ? it->second : 300.0;
        const bool in_budget = r.seconds <= budget;
        const bool pass = r.pass && in_budget;
        std::printf("[%s] %2d. %-28s (%6.2f s / budget %.0f s)  %s%s\n", pass ? "PASS" : "FAIL", index,
                    r.name.c_str(), r.seconds, budget, r.detail.c_str(),
                    in_budget ? "" : "  [over budget]");
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", names.size());
    else
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, names.size());
    return failures;
}
