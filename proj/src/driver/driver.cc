#include "racefixer/driver.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "racefixer/source_model.h"

namespace racefixer::driver {
namespace {

using transform::Patch;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, path + ": read failed");
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, path + ": write failed");
}

std::string describe(const report::DataRace& race) {
  std::ostringstream os;
  os << race.variable << ' ' << race.first << ' ' << race.second;
  return os.str();
}

struct Detection {
  report::RaceSet races;
  std::vector<detect::Deadlock> deadlocks;
  VerdictSummary summary;
  std::vector<Diagnostic> diagnostics;
};

Detection run_builtin(const source::CstNode& tree, const FixConfig& config) {
  detect::ExploreOptions options;
  options.bound = config.bound;
  const detect::Verdict verdict = detect::explore(tree, options);
  auto hybrid = detect::hybrid_verdict(verdict.races, verdict.lockset_races, config.lockset_mode,
                                       config.source_path);
  Detection d;
  d.races = std::move(hybrid.races);
  d.deadlocks = verdict.deadlocks;
  d.summary = {d.races.size(), verdict.deadlocks.size(), verdict.explored, verdict.truncated};
  d.diagnostics = verdict.diagnostics;
  d.diagnostics.insert(d.diagnostics.end(), hybrid.advisories.begin(), hybrid.advisories.end());
  return d;
}

bool involves_guard(const detect::Deadlock& deadlock) {
  return std::any_of(deadlock.mutexes.begin(), deadlock.mutexes.end(), [](const auto& m) {
    return m.starts_with(transform::kMutexPrefix);
  });
}

// Patches for both accesses of a race, or the reason it cannot be fixed.
struct RacePlan {
  std::vector<Patch> patches;
  std::string skip_reason;
};

RacePlan plan_race(const report::DataRace& race, const source::CstNode& tree,
                   const std::string& text) {
  RacePlan plan;
  try {
    const auto mutex = transform::plan_mutex(race.variable, tree, text);
    std::vector<SourceCoord> sites{race.first};
    if (race.second != race.first) sites.push_back(race.second);
    for (const auto& at : sites) {
      const auto handle = source::locate(tree, race.variable, at);
      Patch patch = transform::fix(handle, mutex, text);
      patch.race = race;
      plan.patches.push_back(std::move(patch));
    }
  } catch (const Error& e) {
    plan.patches.clear();
    plan.skip_reason = std::string(to_string(e.code())) + ": " + e.what();
    return plan;
  }
  if (std::all_of(plan.patches.begin(), plan.patches.end(),
                  [](const Patch& p) { return p.empty(); })) {
    plan.patches.clear();
    plan.skip_reason = "AlreadyGuarded: both accesses already hold " +
                       transform::mutex_name_for(race.variable);
  }
  return plan;
}

}  // namespace

void validate(const FixConfig& config) {
  if (config.max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max-iterations must be positive");
  }
  if (config.bound < 1) throw Error(ErrorCode::kInvalidArgument, "bound must be positive");
  if (config.detector == DetectorKind::kReport && config.report_paths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "report detector needs at least one --report");
  }
  if (config.output == OutputMode::kNewFile && config.out_path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "new-file output needs a path");
  }
}

const char* to_string(FixStatus status) {
  switch (status) {
    case FixStatus::kClean: return "Clean";
    case FixStatus::kDeadlockIntroduced: return "DeadlockIntroduced";
    case FixStatus::kIterationCapReached: return "IterationCapReached";
    case FixStatus::kNothingFixable: return "NothingFixable";
  }
  return "?";
}

std::size_t FixReport::total_edits() const {
  std::size_t n = 0;
  for (const auto& it : iterations) {
    if (!it.rolled_back) n += it.edits;
  }
  return n;
}

FixReport fix_text(const std::string& text, const FixConfig& config,
                   std::span<const report::RaceSet> reports) {
  FixReport rep;
  rep.original = text;
  std::string current = text;
  source::CstNode tree = source::parse_source(current);

  std::optional<Detection> pending;
  if (config.detector == DetectorKind::kReport) {
    Detection d;
    d.races = report::merge_runs(reports);
    d.summary.races = d.races.size();
    pending = std::move(d);
  }

  for (int k = 1; k <= config.max_iterations; ++k) {
    Detection detection = pending ? std::move(*pending) : run_builtin(tree, config);
    pending.reset();
    IterationRecord iter;
    iter.found = detection.races;
    iter.diagnostics = detection.diagnostics;

    if (detection.races.empty()) {
      const bool deadlock_free = detection.deadlocks.empty();
      if (!deadlock_free) {
        iter.diagnostics.push_back({Severity::kWarning, "PreexistingDeadlock",
                                    "the program deadlocks independently of inserted locks"});
      }
      rep.iterations.push_back(std::move(iter));
      rep.status = deadlock_free ? FixStatus::kClean : FixStatus::kNothingFixable;
      break;
    }

    std::vector<Patch> patches;
    for (const auto& race : detection.races) {
      RacePlan plan = plan_race(race, tree, current);
      if (!plan.skip_reason.empty()) {
        iter.skipped.push_back({race, plan.skip_reason});
        iter.diagnostics.push_back({Severity::kWarning, "Skipped",
                                    describe(race) + ": " + plan.skip_reason});
        continue;
      }
      ++iter.fixed;
      for (auto& p : plan.patches) patches.push_back(std::move(p));
    }

    auto coalesced = transform::coalesce(std::move(patches), current);
    iter.diagnostics.insert(iter.diagnostics.end(), coalesced.diagnostics.begin(),
                            coalesced.diagnostics.end());
    const source::LineMap lines(current);
    for (const auto& p : coalesced.patches) {
      iter.diagnostics.insert(iter.diagnostics.end(), p.diagnostics.begin(), p.diagnostics.end());
      if (p.empty()) continue;
      iter.applied.push_back({p.race, p.kind, p.mutex.mutex_name, lines.coord(p.anchor_byte)});
    }
    const auto edits = transform::collect_edits(coalesced.patches);
    iter.edits = edits.size();
    if (edits.empty()) {
      rep.iterations.push_back(std::move(iter));
      rep.status = FixStatus::kNothingFixable;
      break;
    }

    std::string patched = source::apply_edits(current, edits);
    source::CstNode patched_tree = source::parse_source(patched);
    for (const auto& issue : transform::check_lock_balance(patched_tree)) {
      std::ostringstream msg;
      msg << issue.function << " " << issue.where << ": " << issue.message;
      iter.diagnostics.push_back({Severity::kWarning, "LockBalance", msg.str()});
    }

    Detection after = run_builtin(patched_tree, config);
    iter.after = after.summary;
    const auto guard_deadlock =
        std::find_if(after.deadlocks.begin(), after.deadlocks.end(), involves_guard);
    if (guard_deadlock != after.deadlocks.end()) {
      iter.rolled_back = true;
      for (const auto& line : guard_deadlock->threads) {
        iter.diagnostics.push_back({Severity::kError, "DeadlockIntroduced", line});
      }
      rep.iterations.push_back(std::move(iter));
      rep.status = FixStatus::kDeadlockIntroduced;
      break;
    }

    current = std::move(patched);
    tree = std::move(patched_tree);
    rep.iterations.push_back(std::move(iter));
    pending = std::move(after);
    rep.status = FixStatus::kIterationCapReached;
  }

  rep.result = current;
  for (const auto& it : rep.iterations) {
    rep.diagnostics.insert(rep.diagnostics.end(), it.diagnostics.begin(), it.diagnostics.end());
  }
  return rep;
}

FixReport run(const FixConfig& config) {
  validate(config);
  const std::string text = read_file(config.source_path);
  std::vector<report::RaceSet> reports;
  std::vector<Diagnostic> parse_diagnostics;
  if (config.detector == DetectorKind::kReport) {
    for (const auto& path : config.report_paths) {
      auto parsed = report::parse_report(read_file(path));
      reports.push_back(std::move(parsed.races));
      for (auto& d : parsed.diagnostics) {
        d.message = path + ": " + d.message;
        parse_diagnostics.push_back(std::move(d));
      }
    }
    // Reported coordinates refer to the unmodified source file.
    for (auto& set : reports) {
      report::RaceSet relabeled;
      for (auto race : set) {
        race.file = config.source_path;
        relabeled.insert(std::move(race));
      }
      set = std::move(relabeled);
    }
  }
  FixReport rep = fix_text(text, config, reports);
  rep.diagnostics.insert(rep.diagnostics.begin(), parse_diagnostics.begin(),
                         parse_diagnostics.end());
  if (config.output == OutputMode::kInPlace && rep.result != text) {
    write_file(config.source_path, rep.result);
  } else if (config.output == OutputMode::kNewFile) {
    write_file(config.out_path, rep.result);
  }
  return rep;
}

std::string serialize(const FixReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.iterations.size(); ++i) {
    const auto& it = report.iterations[i];
    os << "iteration=" << i + 1 << " races=" << it.found.size() << " fixed=" << it.fixed
       << " skipped=" << it.skipped.size() << '\n';
  }
  os << "status=" << to_string(report.status) << '\n';
  return os.str();
}

}  // namespace racefixer::driver
