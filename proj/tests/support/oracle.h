#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <tuple>

#include "racefixer/race_detector.h"

namespace rftest {

struct OracleRace {
  std::string variable;
  racefixer::SourceCoord first;
  racefixer::SourceCoord second;

  friend auto operator<=>(const OracleRace&, const OracleRace&) = default;
};

struct OracleResult {
  std::set<OracleRace> races;
  std::uint64_t interleavings = 0;
  std::uint64_t deadlocked = 0;
};

// Enumerates every complete interleaving and, per trace, builds the
// happens-before graph explicitly (program order, unlock->later lock,
// create->child, child->join). Conflicting accesses from different
// threads with no path between them race. No vector clocks involved.
OracleResult brute_force(std::shared_ptr<const racefixer::detect::Program> program,
                         std::uint64_t cap = 2'000'000);

// Same race set expressed as a detector output for comparison.
std::set<OracleRace> as_oracle(const racefixer::detect::Verdict& verdict);

}  // namespace rftest
