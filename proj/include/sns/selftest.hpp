#pragma once

#include <string>
#include <vector>

namespace sns {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct PropertySuiteOptions {
    std::string direction_file;  // empty = bundled default
    int workers = 0;             // 0 = hardware concurrency
};

/// The fast invariant checks: nonlinearity identities, flow contractivity,
/// OU law and MGF, cubature moments, Sobol' bit-exactness, and estimator
/// reproducibility.  Designed to finish well inside a minute.
std::vector<CheckResult> run_property_suite(const PropertySuiteOptions& opts = {});

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace sns
