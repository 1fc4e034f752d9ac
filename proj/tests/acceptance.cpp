// Acceptance suite: runs every verification check and prints one line per
// check. Exits nonzero if any check fails.

#include "shrinklab/verify.hpp"

#include <cstdio>

int main() {
    const auto results = shrinklab::run_all_checks();
    int failures = 0;
    for (const auto& c : results) {
        std::printf("%s  [%2d] %-55s %s (%.1fs)\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str(), c.seconds);
        if (!c.pass) ++failures;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}
