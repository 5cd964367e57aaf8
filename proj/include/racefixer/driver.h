#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "racefixer/common.h"
#include "racefixer/race_detector.h"
#include "racefixer/report_parser.h"
#include "racefixer/transform_engine.h"

namespace racefixer::driver {

enum class DetectorKind { kBuiltin, kReport };
enum class OutputMode { kInPlace, kNewFile, kDiffOnly };

struct FixConfig {
  std::string source_path;
  std::vector<std::string> report_paths;
  DetectorKind detector = DetectorKind::kBuiltin;
  int max_iterations = 10;
  std::uint64_t bound = 100'000;
  OutputMode output = OutputMode::kDiffOnly;
  std::string out_path;  // for kNewFile
  detect::VerdictMode lockset_mode = detect::VerdictMode::kHappensBefore;
};

// Throws Error(kInvalidArgument) on inconsistent settings.
void validate(const FixConfig& config);

enum class FixStatus { kClean, kDeadlockIntroduced, kIterationCapReached, kNothingFixable };

const char* to_string(FixStatus status);

struct AppliedPatch {
  report::DataRace race;
  transform::Template kind;
  std::string mutex;
  SourceCoord anchor;
};

struct SkippedRace {
  report::DataRace race;
  std::string reason;
};

struct VerdictSummary {
  std::size_t races = 0;
  std::size_t deadlocks = 0;
  std::uint64_t explored = 0;
  bool truncated = false;
};

struct IterationRecord {
  report::RaceSet found;
  std::vector<AppliedPatch> applied;
  std::vector<SkippedRace> skipped;
  std::size_t fixed = 0;  // races whose every access got a patch
  std::size_t edits = 0;
  std::optional<VerdictSummary> after;
  bool rolled_back = false;
  std::vector<Diagnostic> diagnostics;
};

struct FixReport {
  std::vector<IterationRecord> iterations;
  FixStatus status = FixStatus::kNothingFixable;
  std::string original;
  std::string result;
  std::vector<Diagnostic> diagnostics;

  // Total edits that survived into `result`.
  std::size_t total_edits() const;
};

// The detect-patch loop on in-memory text. `reports` feed the first
// iteration in report mode; every later iteration re-detects with the
// builtin explorer. Throws SyntaxError for unparsable input and
// Error(kUnsupportedConstruct) when the builtin detector cannot run it.
FixReport fix_text(const std::string& text, const FixConfig& config,
                   std::span<const report::RaceSet> reports = {});

// Reads the source and reports named by the config, runs fix_text and
// writes the result according to the output mode. Throws Error(kIo).
FixReport run(const FixConfig& config);

// "iteration=<k> races=<n> fixed=<m> skipped=<s>" per iteration, then
// "status=<S>".
std::string serialize(const FixReport& report);

// Unified diff with three lines of context; empty for identical inputs.
std::string render_diff(std::string_view before, std::string_view after,
                        std::string_view before_name = "a", std::string_view after_name = "b");

}  // namespace racefixer::driver
