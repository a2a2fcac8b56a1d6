/// \file selftest.hpp
/// The acceptance suite: twelve empirical criteria checking the structural
/// invariants and solver guarantees at small scale. Shared by the `selftest`
/// CLI command and the acceptance test binary.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cmw {

struct SelftestConfig {
  unsigned oracle_max_vars{4};  ///< criteria needing larger tables are skipped
  unsigned workers{1};
  std::uint64_t seed{20260826};
};

struct CriterionResult {
  int id{0};
  std::string name;
  bool pass{false};
  bool skipped{false};
  std::string measured;
  std::string expected;
  double seconds{0.0};
};

/// Runs all twelve criteria in order. Deterministic for a fixed config
/// (stdout-facing fields never depend on timing). `progress`, when given,
/// receives human-oriented status lines (timings included).
std::vector<CriterionResult> run_acceptance(const SelftestConfig& cfg,
                                            std::ostream* progress = nullptr);

/// One stable line per criterion: `criterion <id> <PASS|FAIL|SKIP>
/// name=<name> measured=<...> expected=<...>`.
std::string format_results(const std::vector<CriterionResult>& results);

/// False iff any non-skipped criterion failed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace cmw
