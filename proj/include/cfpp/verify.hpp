#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfpp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// "fast" or "full"; full adds the n = 1e5 statistical suites.
  std::string level = "fast";
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  /// Corrupts the free-pool counter of the conservation check's run.
  bool inject_conservation_fault = false;
};

/// Runs the oracle and property suite. A check that throws is reported as a
/// failure with the exception text as detail.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace cfpp
