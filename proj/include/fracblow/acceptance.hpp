#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracblow {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// One-line summary of the measured quantities.
  std::string detail;
  double seconds = 0.0;
  /// Wall-clock budget in seconds (0 when the criterion has none).
  double budget = 0.0;
};

struct AcceptanceOptions {
  /// Seed of the randomized property suites (criteria 1 and 4).
  std::uint64_t seed = 20240601;
  /// Criteria to run; empty means all of 1..10.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order. `on_result` is called as soon as each finishes.
/// A criterion with a budget fails when it runs over it.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "criterion 5: PASS  <detail>  (12.3 s)".
std::string format_result(const CriterionResult& r);

}  // namespace fracblow
