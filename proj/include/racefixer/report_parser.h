#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "racefixer/common.h"

namespace racefixer::report {

// One reported race: the variable and the two racing source coordinates.
// Coordinates are stored in canonical order (first <= second).
struct DataRace {
  std::string variable;
  SourceCoord first;
  SourceCoord second;
  std::string file;

  DataRace() = default;
  DataRace(std::string variable, SourceCoord a, SourceCoord b,
           std::string file = {});

  // Identity ignores the file and the orientation of the pair.
  bool same_race(const DataRace& other) const;

  friend bool operator==(const DataRace&, const DataRace&) = default;
};

// Ordering used by RaceSet: variable, first.line, first.column,
// second.line, second.column, then file as a tie-breaker.
bool race_less(const DataRace& a, const DataRace& b);

// Deduplicated, deterministically ordered collection of races.
class RaceSet {
 public:
  RaceSet() = default;
  RaceSet(std::initializer_list<DataRace> races);

  // Returns false when an equal race was already present. On a duplicate
  // the entry with the lexicographically smaller file is kept.
  bool insert(DataRace race);

  const std::vector<DataRace>& races() const { return races_; }
  std::size_t size() const { return races_.size(); }
  bool empty() const { return races_.empty(); }
  auto begin() const { return races_.begin(); }
  auto end() const { return races_.end(); }

  friend bool operator==(const RaceSet&, const RaceSet&) = default;

 private:
  std::vector<DataRace> races_;
};

struct ParseResult {
  RaceSet races;
  std::vector<Diagnostic> diagnostics;
};

// Total: never throws on malformed input. Malformed blocks and
// non-global locations come back as diagnostics.
ParseResult parse_report(std::string_view text);

RaceSet merge_runs(std::span<const RaceSet> sets);

// "<variable> <l1> <c1> <l2> <c2>\n" per race.
std::string format_summary(const RaceSet& set);

}  // namespace racefixer::report
