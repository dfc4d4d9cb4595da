#pragma once

#include <string>
#include <vector>

#include "ampere/vector3.hpp"

namespace ampere {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
};

/// Probe points used by the shipped Maxwell checks (also in
/// scenes/square_sheet.json).
const std::vector<Vector3>& default_maxwell_points();

/// Probe points for the curl check around the unit loop; all at distance >= 1.
const std::vector<Vector3>& default_curl_points();

/// Criteria 1-10. `transcript` receives every number the criteria depend on
/// (full-precision CSV of each report) and nothing timing related.
std::vector<CriterionResult> run_core_criteria(std::string* transcript = nullptr);

/// Criteria 1-11; 11 reruns 1-10 with 1 and 4 threads and compares the
/// transcripts byte for byte.
std::vector<CriterionResult> run_acceptance();

/// One line per criterion: "criterion <id> <PASS|FAIL> <title>: <detail>".
std::string format_results(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace ampere
