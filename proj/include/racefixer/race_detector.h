#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "racefixer/common.h"
#include "racefixer/report_parser.h"
#include "racefixer/source_model.h"

namespace racefixer::detect {

using ThreadId = int;

// ---- logical time ----

class VectorClock {
 public:
  VectorClock() = default;
  VectorClock(std::initializer_list<std::uint32_t> components) : c_(components) {}

  std::uint32_t get(ThreadId t) const {
    return static_cast<std::size_t>(t) < c_.size() ? c_[t] : 0;
  }
  void set(ThreadId t, std::uint32_t value);
  void tick(ThreadId t) { set(t, get(t) + 1); }
  void join(const VectorClock& other);
  // Component-wise <=.
  bool leq(const VectorClock& other) const;
  bool concurrent_with(const VectorClock& other) const {
    return !leq(other) && !other.leq(*this);
  }
  std::size_t size() const { return c_.size(); }

  friend bool operator==(const VectorClock& a, const VectorClock& b);

 private:
  std::vector<std::uint32_t> c_;
};

std::ostream& operator<<(std::ostream& os, const VectorClock& clock);

// ---- compiled program ----

enum class Op : std::uint8_t {
  kPush, kLoadLocal, kStoreLocal, kDup, kPop,
  kNeg, kNot, kToBool,
  kAdd, kSub, kMul, kDiv, kMod, kLt, kLe, kGt, kGe, kEq, kNe,
  kJump, kJumpIfZero, kReturn,
  // Visible operations: the scheduler may switch threads before each.
  kLoadGlobal, kStoreGlobal, kLock, kUnlock, kCreate, kJoin,
};

bool is_visible(Op op);

struct Instr {
  Op op;
  std::int64_t arg = 0;
  SourceCoord where;
};

struct Function {
  std::string name;
  std::vector<Instr> code;
  int local_count = 0;
  bool has_parameter = false;
};

// The C subset lowered to a small stack machine. Throws
// Error(kUnsupportedConstruct) for programs outside the subset.
struct Program {
  std::vector<std::string> globals;
  std::vector<std::int64_t> global_initial;
  std::vector<std::string> mutexes;
  std::vector<Function> functions;
  int main_function = -1;

  static std::shared_ptr<const Program> compile(const source::CstNode& unit);
};

// ---- execution ----

struct Limits {
  int max_spawned_threads = 4;
  int step_budget = 10'000;
};

enum class EventKind { kRead, kWrite, kLock, kUnlock, kCreate, kJoin };

struct Event {
  ThreadId thread = 0;
  EventKind kind = EventKind::kRead;
  // Global index, mutex index or thread id, depending on kind.
  int target = 0;
  SourceCoord where;
};

struct ThreadState {
  ThreadId id = 0;
  int function = 0;
  std::uint32_t pc = 0;
  std::vector<std::int64_t> stack;
  std::vector<std::int64_t> locals;
  std::vector<int> held;
  bool finished = false;
  int steps = 0;
};

struct StepOutcome {
  Event event;
  std::vector<Diagnostic> diagnostics;
  // The schedule cannot continue (runtime fault or step budget).
  bool aborted = false;
  // False when the fault prevented the visible operation itself.
  bool performed = true;
};

// One interleaving in progress. Threads always rest just before their
// next visible operation; step() runs that operation and then the
// thread's local code up to the following visible operation.
class Machine {
 public:
  Machine(std::shared_ptr<const Program> program, Limits limits = {});

  std::vector<ThreadId> enabled() const;
  StepOutcome step(ThreadId thread);

  bool all_finished() const;
  bool stuck() const { return !all_finished() && enabled().empty(); }
  // Set when main's code before its first visible operation faulted.
  const std::vector<Diagnostic>& start_diagnostics() const { return start_diagnostics_; }
  bool start_aborted() const { return start_aborted_; }

  const std::vector<ThreadState>& threads() const { return threads_; }
  const std::vector<std::int64_t>& globals() const { return globals_; }
  int mutex_owner(int mutex) const { return owners_[mutex]; }
  const Program& program() const { return *program_; }

  // Human-readable status of every unfinished thread, e.g.
  // "T1 waits for __rf_mutex_b held by T0".
  std::vector<std::string> describe_blocked() const;
  // Mutex names that blocked threads wait on or hold.
  std::vector<std::string> blocked_mutexes() const;

 private:
  bool advance(ThreadState& thread, std::vector<Diagnostic>& out);
  bool is_enabled(const ThreadState& thread) const;

  std::shared_ptr<const Program> program_;
  Limits limits_;
  std::vector<ThreadState> threads_;
  std::vector<std::int64_t> globals_;
  std::vector<int> owners_;
  std::vector<Diagnostic> start_diagnostics_;
  bool start_aborted_ = false;
};

// Re-executes a schedule from the initial state.
Machine replay(std::shared_ptr<const Program> program, std::span<const ThreadId> schedule,
               Limits limits = {});

// ---- analyses ----

enum class AccessKind { kRead, kWrite };

struct AccessRecord {
  int variable = 0;
  AccessKind kind = AccessKind::kRead;
  ThreadId thread = 0;
  VectorClock clock;
  std::vector<int> lockset;  // sorted mutex indices
  SourceCoord where;
};

enum class DetectionMode { kHappensBefore, kLockset };

struct RaceKey {
  int variable;
  SourceCoord first;
  SourceCoord second;
  friend auto operator<=>(const RaceKey&, const RaceKey&) = default;
};

struct DetectedRace {
  std::string variable;
  AccessRecord earlier;
  AccessRecord later;
  DetectionMode mode = DetectionMode::kHappensBefore;
  // Schedule prefix whose last step performed `later`.
  std::vector<ThreadId> witness;

  RaceKey key() const;
};

// Races between `current` and each prior record it is unordered with.
std::vector<DetectedRace> hb_check(const AccessRecord& current,
                                   std::span<const AccessRecord> history);

struct LocksetState {
  bool initialized = false;
  std::vector<int> candidates;
  // Most recent access per thread, with a global sequence number.
  std::vector<std::pair<std::uint64_t, AccessRecord>> recent;
  std::uint64_t sequence = 0;
};

// Intersects the candidate set with the current lockset and flags a race
// once it is empty and a write is involved.
std::optional<DetectedRace> lockset_check(const AccessRecord& current, LocksetState& state);

// Clock bookkeeping for synchronization operations.
struct ClockState {
  std::vector<VectorClock> threads;
  std::vector<VectorClock> mutexes;
  std::vector<int> owners;  // -1 when free
};

enum class SyncStatus { kOk, kUnlockNotHeld, kSelfDeadlock };

// Lock joins the mutex clock into the thread, unlock publishes the thread
// clock to the mutex, create seeds the child with the parent clock, join
// pulls the child's final clock. Each ticks the acting thread.
SyncStatus synchronization_edges(const Event& event, ClockState& state);

// Online happens-before and lockset analysis of one interleaving.
class Analyzer {
 public:
  explicit Analyzer(const Program& program);

  void observe(const Event& event, std::span<const ThreadId> schedule,
               std::vector<DetectedRace>& hb_races, std::vector<DetectedRace>& lockset_races);

  const ClockState& clocks() const { return clocks_; }

 private:
  // Latest access per (thread, source site). An older access from the same
  // site is ordered before the newer one, so it cannot race where the
  // newer one does not.
  using SiteKey = std::pair<ThreadId, SourceCoord>;
  struct History {
    std::map<SiteKey, AccessRecord> reads;
    std::map<SiteKey, AccessRecord> writes;
  };

  const Program* program_;
  ClockState clocks_;
  std::vector<std::vector<int>> held_;
  std::vector<History> history_;
  std::vector<LocksetState> lockset_;
};

// ---- exploration ----

struct ExploreOptions {
  std::uint64_t bound = 100'000;
  Limits limits;
};

struct Deadlock {
  std::vector<ThreadId> schedule;
  std::vector<std::string> threads;
  std::vector<std::string> mutexes;
};

struct Verdict {
  std::shared_ptr<const Program> program;
  std::vector<DetectedRace> races;          // happens-before, sorted by key
  std::vector<DetectedRace> lockset_races;  // sorted by key
  std::vector<Deadlock> deadlocks;          // sorted by schedule
  std::vector<Diagnostic> diagnostics;
  std::uint64_t explored = 0;
  bool truncated = false;
};

// Depth-first enumeration of schedules, branching before every visible
// operation. Serial reference implementation.
Verdict explore(const source::CstNode& unit, const ExploreOptions& options = {});
Verdict explore(std::shared_ptr<const Program> program, const ExploreOptions& options = {});

// Same search with subtrees distributed over OpenMP threads. Identical
// to explore() unless the bound truncates the search.
Verdict explore_parallel(const source::CstNode& unit, const ExploreOptions& options = {},
                         int workers = 0);
Verdict explore_parallel(std::shared_ptr<const Program> program,
                         const ExploreOptions& options = {}, int workers = 0);

enum class VerdictMode { kHappensBefore, kLockset, kUnion };

struct HybridResult {
  report::RaceSet races;
  std::vector<Diagnostic> advisories;
};

// Default mode reports happens-before races; lockset-only findings become
// advisories.
HybridResult hybrid_verdict(std::span<const DetectedRace> hb, std::span<const DetectedRace> lockset,
                            VerdictMode mode = VerdictMode::kHappensBefore,
                            const std::string& file = {});

// Renders races in the sanitizer log dialect accepted by parse_report.
std::string render_tsan_log(const Verdict& verdict, std::string_view path);

}  // namespace racefixer::detect
