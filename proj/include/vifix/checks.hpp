#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vifix {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Names of the invariant suites runnable via the CLI, one per line in
/// list_checks(). Each suite is a deterministic, seeded property check over
/// one module's contracts.
std::vector<std::string> check_names();

/// The text listing printed by `vifix list-checks`.
std::string list_checks();

/// Runs one named suite. Throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name, std::uint64_t seed);

/// Runs every suite in order.
std::vector<CheckResult> run_all_checks(std::uint64_t seed);

}  // namespace vifix
