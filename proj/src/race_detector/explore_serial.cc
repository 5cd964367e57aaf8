#include <algorithm>
#include <sstream>

#include "racefixer/race_detector.h"
#include "search.h"

namespace racefixer::detect {
namespace detail {
namespace {

// Witness preference: a schedule where the two accesses are adjacent, then
// the lexicographically smallest.
bool better(const Collector::Found& a, const Collector::Found& b) {
  if (a.adjacent != b.adjacent) return a.adjacent;
  return a.race.witness < b.race.witness;
}

std::string signature(const Machine& m) {
  std::ostringstream os;
  for (const auto& t : m.threads()) {
    os << t.function << ':' << t.pc << ':' << t.finished << '[';
    for (auto v : t.stack) os << v << ',';
    os << "][";
    for (auto v : t.locals) os << v << ',';
    os << "][";
    for (auto v : t.held) os << v << ',';
    os << "];";
  }
  os << '|';
  for (auto v : m.globals()) os << v << ',';
  return os.str();
}

bool is_adjacent(const std::optional<Event>& previous, const DetectedRace& race) {
  return previous && previous->thread == race.earlier.thread &&
         (previous->kind == EventKind::kRead || previous->kind == EventKind::kWrite) &&
         previous->target == race.earlier.variable && previous->where == race.earlier.where;
}

void record_leaf(Frame& frame, Collector& out) {
  ++out.explored;
  const Machine& m = frame.machine;
  if (m.all_finished()) return;
  Deadlock d;
  d.schedule = frame.schedule;
  d.threads = m.describe_blocked();
  d.mutexes = m.blocked_mutexes();
  for (const auto& t : m.threads()) {
    if (t.finished) continue;
    const Instr& ins = m.program().functions[t.function].code[t.pc];
    if (ins.op == Op::kLock && m.mutex_owner(static_cast<int>(ins.arg)) == t.id) {
      out.diagnostics.insert({Severity::kError, "SelfDeadlock",
                              "T" + std::to_string(t.id) + " locks " +
                                  m.program().mutexes[ins.arg] + " which it already holds"});
    }
  }
  out.add_deadlock(signature(m), std::move(d));
}

}  // namespace

void Collector::add_race(std::map<RaceKey, Found>& into, DetectedRace race, bool adjacent) {
  Found found{std::move(race), adjacent};
  const auto key = found.race.key();
  auto it = into.find(key);
  if (it == into.end()) {
    into.emplace(key, std::move(found));
  } else if (better(found, it->second)) {
    it->second = std::move(found);
  }
}

void Collector::add_deadlock(const std::string& sig, Deadlock deadlock) {
  auto it = deadlocks.find(sig);
  if (it == deadlocks.end()) {
    deadlocks.emplace(sig, std::move(deadlock));
  } else if (deadlock.schedule < it->second.schedule) {
    it->second = std::move(deadlock);
  }
}

void Collector::merge(Collector&& other) {
  for (auto& [k, f] : other.races) add_race(races, std::move(f.race), f.adjacent);
  for (auto& [k, f] : other.lockset_races) add_race(lockset_races, std::move(f.race), f.adjacent);
  for (auto& [sig, d] : other.deadlocks) add_deadlock(sig, std::move(d));
  diagnostics.merge(other.diagnostics);
  explored += other.explored;
  truncated = truncated || other.truncated;
}

Verdict Collector::finish(std::shared_ptr<const Program> program, std::uint64_t bound) && {
  Verdict v;
  v.program = std::move(program);
  for (auto& [k, f] : races) v.races.push_back(std::move(f.race));
  for (auto& [k, f] : lockset_races) v.lockset_races.push_back(std::move(f.race));
  for (auto& [sig, d] : deadlocks) v.deadlocks.push_back(std::move(d));
  std::sort(v.deadlocks.begin(), v.deadlocks.end(),
            [](const Deadlock& a, const Deadlock& b) { return a.schedule < b.schedule; });
  v.diagnostics.assign(diagnostics.begin(), diagnostics.end());
  v.truncated = truncated || explored > bound;
  v.explored = std::min(explored, bound);
  if (v.truncated && explored >= bound) {
    v.diagnostics.push_back({Severity::kWarning, "Truncated",
                             "exploration stopped after " + std::to_string(bound) +
                                 " interleavings"});
  }
  return v;
}

Frame root_frame(const std::shared_ptr<const Program>& program, const Limits& limits,
                 Collector& out) {
  Frame root{Machine(program, limits), Analyzer(*program), {}, std::nullopt, {}, 0};
  out.diagnostics.insert(root.machine.start_diagnostics().begin(),
                         root.machine.start_diagnostics().end());
  root.choices = root.machine.enabled();
  return root;
}

std::optional<Frame> expand(Frame& parent, Collector& out) {
  const ThreadId t = parent.choices[parent.next++];
  // The last child takes over the parent's state instead of copying it.
  Frame child = parent.next == parent.choices.size() ? Frame(std::move(parent)) : Frame(parent);
  child.choices.clear();
  child.next = 0;
  child.schedule.push_back(t);

  StepOutcome step = child.machine.step(t);
  std::vector<DetectedRace> hb;
  std::vector<DetectedRace> ls;
  if (step.performed) child.analyzer.observe(step.event, child.schedule, hb, ls);
  for (auto& r : hb) {
    const bool adj = is_adjacent(child.last, r);
    out.add_race(out.races, std::move(r), adj);
  }
  for (auto& r : ls) {
    const bool adj = is_adjacent(child.last, r);
    out.add_race(out.lockset_races, std::move(r), adj);
  }
  if (step.performed) child.last = step.event;
  for (auto& d : step.diagnostics) {
    if (d.code == "StepBudgetExceeded") out.truncated = true;
    out.diagnostics.insert(std::move(d));
  }
  if (step.aborted) {
    ++out.explored;
    return std::nullopt;
  }
  child.choices = child.machine.enabled();
  if (child.choices.empty()) {
    record_leaf(child, out);
    return std::nullopt;
  }
  return child;
}

void search(Frame root, Collector& out, std::uint64_t bound,
            std::atomic<std::uint64_t>* shared) {
  if (root.choices.empty()) {
    if (!root.machine.start_aborted()) record_leaf(root, out);
    else ++out.explored;
    return;
  }
  std::vector<Frame> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.choices.size()) {
      stack.pop_back();
      continue;
    }
    const std::uint64_t seen = shared ? shared->load(std::memory_order_relaxed) : out.explored;
    if (seen >= bound) {
      out.truncated = true;
      return;
    }
    const bool last_child = top.next + 1 == top.choices.size();
    const std::uint64_t before = out.explored;
    auto child = expand(top, out);
    if (shared && out.explored != before) {
      shared->fetch_add(out.explored - before, std::memory_order_relaxed);
    }
    if (last_child) stack.pop_back();
    if (child) stack.push_back(std::move(*child));
  }
}

}  // namespace detail

Verdict explore(std::shared_ptr<const Program> program, const ExploreOptions& options) {
  detail::Collector out;
  detail::search(detail::root_frame(program, options.limits, out), out, options.bound);
  return std::move(out).finish(std::move(program), options.bound);
}

Verdict explore(const source::CstNode& unit, const ExploreOptions& options) {
  return explore(Program::compile(unit), options);
}

}  // namespace racefixer::detect
