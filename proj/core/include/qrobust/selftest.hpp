// selftest.hpp
// Reduced-size property suites runnable from the CLI. Each group re-checks
// the library's core invariants (unitarity, basis orthogonality, conversion
// round-trips, certificate consistency, ...) on freshly drawn random
// instances.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

struct SelftestOptions {
    std::uint64_t seed = 20260808;
    int cases = 25;  // random instances per property
    // Test hook: force one artificial tolerance violation so harness
    // plumbing (FAIL reporting, exit codes) can itself be exercised.
    bool inject_failure = false;
};

struct SelftestResult {
    std::string group;
    int checks = 0;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

std::vector<std::string> selftest_groups();

SelftestResult run_selftest_group(const std::string& group,
                                  const SelftestOptions& options);

std::vector<SelftestResult> run_selftest(std::span<const std::string> groups,
                                         const SelftestOptions& options);

}  // namespace qrobust
