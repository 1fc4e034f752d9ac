#pragma once

#include <string>
#include <vector>

namespace shrinklab {

/// One verification check: an inequality the theory guarantees, evaluated at
/// a fixed desk-scale configuration. The tag names the identity or bound the
/// check embodies.
struct CheckResult {
    int id = 0;
    std::string name;
    std::string tag;
    bool pass = false;
    double margin = 0.0;  // positive slack in the binding inequality
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full verification suite (11 checks). Each check is independent;
/// failures are recorded, not thrown.
std::vector<CheckResult> run_all_checks();

}  // namespace shrinklab
