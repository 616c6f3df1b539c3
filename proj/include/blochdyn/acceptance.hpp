#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace blochdyn {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240917;
  int threads = 1;
};

/// Runs the ten acceptance criteria in order. When `log` is set, each result
/// line is written there as soon as the criterion finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {}, std::ostream* log = nullptr);

/// "PASS [ 3] title: detail (1.23 s)"
std::string format_result(const CriterionResult& r);

}  // namespace blochdyn
