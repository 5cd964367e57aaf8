#include <algorithm>
#include <iterator>
#include <set>
#include <sstream>

#include "racefixer/race_detector.h"

namespace racefixer::detect {

RaceKey DetectedRace::key() const {
  return RaceKey{earlier.variable, std::min(earlier.where, later.where),
                 std::max(earlier.where, later.where)};
}

std::vector<DetectedRace> hb_check(const AccessRecord& current,
                                   std::span<const AccessRecord> history) {
  std::vector<DetectedRace> races;
  for (const auto& prior : history) {
    if (prior.variable != current.variable) continue;
    if (prior.kind == AccessKind::kRead && current.kind == AccessKind::kRead) continue;
    if (!prior.clock.concurrent_with(current.clock)) continue;
    DetectedRace race;
    race.earlier = prior;
    race.later = current;
    race.mode = DetectionMode::kHappensBefore;
    races.push_back(std::move(race));
  }
  return races;
}

std::optional<DetectedRace> lockset_check(const AccessRecord& current, LocksetState& state) {
  if (!state.initialized) {
    state.candidates = current.lockset;
    state.initialized = true;
  } else {
    std::vector<int> kept;
    std::set_intersection(state.candidates.begin(), state.candidates.end(),
                          current.lockset.begin(), current.lockset.end(),
                          std::back_inserter(kept));
    state.candidates = std::move(kept);
  }

  std::optional<DetectedRace> race;
  if (state.candidates.empty()) {
    const std::pair<std::uint64_t, AccessRecord>* partner = nullptr;
    const std::pair<std::uint64_t, AccessRecord>* same_thread = nullptr;
    for (const auto& entry : state.recent) {
      const bool writes = entry.second.kind == AccessKind::kWrite ||
                          current.kind == AccessKind::kWrite;
      if (!writes) continue;
      auto& slot = entry.second.thread == current.thread ? same_thread : partner;
      if (!slot || slot->first < entry.first) slot = &entry;
    }
    if (!partner) partner = same_thread;
    if (partner) {
      race.emplace();
      race->earlier = partner->second;
      race->later = current;
      race->mode = DetectionMode::kLockset;
    }
  }

  const auto seq = ++state.sequence;
  auto it = std::find_if(state.recent.begin(), state.recent.end(),
                         [&](const auto& e) { return e.second.thread == current.thread; });
  if (it == state.recent.end()) {
    state.recent.emplace_back(seq, current);
  } else {
    *it = {seq, current};
  }
  return race;
}

SyncStatus synchronization_edges(const Event& event, ClockState& state) {
  const ThreadId t = event.thread;
  auto ensure_thread = [&](ThreadId id) {
    if (static_cast<std::size_t>(id) >= state.threads.size()) state.threads.resize(id + 1);
  };
  auto ensure_mutex = [&](int m) {
    if (static_cast<std::size_t>(m) >= state.mutexes.size()) {
      state.mutexes.resize(m + 1);
      state.owners.resize(m + 1, -1);
    }
  };
  ensure_thread(t);
  switch (event.kind) {
    case EventKind::kLock:
      ensure_mutex(event.target);
      if (state.owners[event.target] == t) return SyncStatus::kSelfDeadlock;
      state.owners[event.target] = t;
      state.threads[t].join(state.mutexes[event.target]);
      state.threads[t].tick(t);
      return SyncStatus::kOk;
    case EventKind::kUnlock:
      ensure_mutex(event.target);
      if (state.owners[event.target] != t) return SyncStatus::kUnlockNotHeld;
      state.owners[event.target] = -1;
      state.mutexes[event.target] = state.threads[t];
      state.threads[t].tick(t);
      return SyncStatus::kOk;
    case EventKind::kCreate:
      ensure_thread(event.target);
      state.threads[event.target] = state.threads[t];
      state.threads[event.target].tick(event.target);
      state.threads[t].tick(t);
      return SyncStatus::kOk;
    case EventKind::kJoin:
      ensure_thread(event.target);
      state.threads[t].join(state.threads[event.target]);
      state.threads[t].tick(t);
      return SyncStatus::kOk;
    case EventKind::kRead:
    case EventKind::kWrite:
      return SyncStatus::kOk;
  }
  return SyncStatus::kOk;
}

Analyzer::Analyzer(const Program& program)
    : program_(&program),
      held_(1),
      history_(program.globals.size()),
      lockset_(program.globals.size()) {
  clocks_.threads.resize(1);
  clocks_.threads[0].set(0, 1);
  clocks_.mutexes.resize(program.mutexes.size());
  clocks_.owners.assign(program.mutexes.size(), -1);
}

void Analyzer::observe(const Event& event, std::span<const ThreadId> schedule,
                       std::vector<DetectedRace>& hb_races,
                       std::vector<DetectedRace>& lockset_races) {
  const ThreadId t = event.thread;
  if (static_cast<std::size_t>(t) >= held_.size()) held_.resize(t + 1);
  switch (event.kind) {
    case EventKind::kLock:
      if (synchronization_edges(event, clocks_) == SyncStatus::kOk) {
        auto& held = held_[t];
        held.insert(std::upper_bound(held.begin(), held.end(), event.target), event.target);
      }
      return;
    case EventKind::kUnlock:
      if (synchronization_edges(event, clocks_) == SyncStatus::kOk) {
        auto& held = held_[t];
        held.erase(std::remove(held.begin(), held.end(), event.target), held.end());
      }
      return;
    case EventKind::kCreate:
      if (static_cast<std::size_t>(event.target) >= held_.size()) held_.resize(event.target + 1);
      synchronization_edges(event, clocks_);
      return;
    case EventKind::kJoin:
      synchronization_edges(event, clocks_);
      return;
    case EventKind::kRead:
    case EventKind::kWrite:
      break;
  }

  AccessRecord current;
  current.variable = event.target;
  current.kind = event.kind == EventKind::kWrite ? AccessKind::kWrite : AccessKind::kRead;
  current.thread = t;
  current.clock = clocks_.threads[t];
  current.lockset = held_[t];
  current.where = event.where;

  auto& history = history_[event.target];
  std::vector<AccessRecord> priors;
  auto gather = [&](const std::map<SiteKey, AccessRecord>& sites) {
    for (const auto& [key, record] : sites) {
      if (key.first != t) priors.push_back(record);
    }
  };
  gather(history.writes);
  if (current.kind == AccessKind::kWrite) gather(history.reads);

  const std::string& name = program_->globals[event.target];
  for (auto& race : hb_check(current, priors)) {
    race.variable = name;
    race.witness.assign(schedule.begin(), schedule.end());
    hb_races.push_back(std::move(race));
  }
  if (auto race = lockset_check(current, lockset_[event.target])) {
    race->variable = name;
    race->witness.assign(schedule.begin(), schedule.end());
    lockset_races.push_back(std::move(*race));
  }

  auto& sites = current.kind == AccessKind::kWrite ? history.writes : history.reads;
  const SiteKey key{t, current.where};
  sites.insert_or_assign(key, std::move(current));
}

HybridResult hybrid_verdict(std::span<const DetectedRace> hb, std::span<const DetectedRace> lockset,
                            VerdictMode mode, const std::string& file) {
  HybridResult result;
  auto to_data_race = [&](const DetectedRace& r) {
    return report::DataRace(r.variable, r.earlier.where, r.later.where, file);
  };
  if (mode != VerdictMode::kLockset) {
    for (const auto& r : hb) result.races.insert(to_data_race(r));
  }
  std::set<RaceKey> hb_keys;
  for (const auto& r : hb) hb_keys.insert(r.key());
  for (const auto& r : lockset) {
    if (mode != VerdictMode::kHappensBefore) {
      result.races.insert(to_data_race(r));
      continue;
    }
    if (hb_keys.contains(r.key())) continue;
    const auto key = r.key();
    std::ostringstream msg;
    msg << "locking discipline violated on '" << r.variable << "' between " << key.first
        << " and " << key.second << " (no happens-before race)";
    result.advisories.push_back({Severity::kNote, "LocksetAdvisory", msg.str()});
  }
  return result;
}

}  // namespace racefixer::detect
