#pragma once

#include <atomic>
#include <map>
#include <set>

#include "racefixer/race_detector.h"

namespace racefixer::detect::detail {

// One node of the schedule tree with the analysis state reached there.
struct Frame {
  Machine machine;
  Analyzer analyzer;
  std::vector<ThreadId> schedule;
  std::optional<Event> last;
  std::vector<ThreadId> choices;
  std::size_t next = 0;
};

// Results accumulated over explored schedules. merge() is order
// independent, so subtrees may be explored in any order.
struct Collector {
  struct Found {
    DetectedRace race;
    bool adjacent = false;
  };
  std::map<RaceKey, Found> races;
  std::map<RaceKey, Found> lockset_races;
  std::map<std::string, Deadlock> deadlocks;  // keyed by stuck-state signature
  std::set<Diagnostic> diagnostics;
  std::uint64_t explored = 0;
  bool truncated = false;

  void add_race(std::map<RaceKey, Found>& into, DetectedRace race, bool adjacent);
  void add_deadlock(const std::string& signature, Deadlock deadlock);
  void merge(Collector&& other);
  Verdict finish(std::shared_ptr<const Program> program, std::uint64_t bound) &&;
};

Frame root_frame(const std::shared_ptr<const Program>& program, const Limits& limits,
                 Collector& out);

// Takes the next unexplored child of `parent`. Returns the child frame if it
// has further choices; leaves are recorded in `out`.
std::optional<Frame> expand(Frame& parent, Collector& out);

// Depth-first search of the subtree under `root` until `bound` leaves.
// With `shared`, the bound applies to the leaves counted there by every
// concurrent search instead of to `out` alone.
void search(Frame root, Collector& out, std::uint64_t bound,
            std::atomic<std::uint64_t>* shared = nullptr);

}  // namespace racefixer::detect::detail
