#pragma once

#include <string>
#include <vector>

#include "ufb/weiss_monitor.hpp"

namespace ufb {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;    // deterministic numbers behind the verdict
    double seconds = 0.0;  // wall clock, including shared solves first needed here
    double budget = 0.0;   // seconds allowed
};

struct AcceptanceOptions {
    WeissVariant variant = WeissVariant::proof_2x;
    std::vector<int> only;  // empty runs all ten
};

/// Runs the acceptance criteria in order. Solutions shared between
/// criteria are computed once.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

/// "PASS  3  eventual negativity: ... (0.12 s)"
std::string format_line(const CriterionResult& r);

}  // namespace ufb
