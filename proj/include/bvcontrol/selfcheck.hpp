#pragma once

#include <string>
#include <vector>

namespace bvc {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // empty on success, otherwise what went wrong
};

/// Analytic gradient of the smooth objective part against central finite
/// differences at seeded random points on several mesh sizes.
CheckResult check_gradient_fd(unsigned seed);

/// On an 8-cell mesh with every interior node in the support, compare the
/// proximal solver's optimum against exhaustive enumeration of all 3^7
/// active-sign patterns of the jump heights.
CheckResult check_small_support_oracle(unsigned seed);

/// Solve both built-in examples and verify the discrete first-order
/// conditions hold to 1e-6 * alpha.
CheckResult check_kkt();

/// Internal consistency of the constructed example-1 data.
CheckResult check_example1_consistency();

std::vector<CheckResult> run_all_checks(unsigned seed);

}  // namespace bvc
