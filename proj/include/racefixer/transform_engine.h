#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "racefixer/common.h"
#include "racefixer/report_parser.h"
#include "racefixer/source_model.h"

namespace racefixer::transform {

inline constexpr std::string_view kMutexPrefix = "__rf_mutex_";
inline constexpr std::string_view kLockMarker = "// lock added by RaceFixer";
inline constexpr std::string_view kUnlockMarker = "// unlock added by RaceFixer";

std::string mutex_name_for(std::string_view variable);

enum class Template {
  kPlainStatement,
  kIfWithElse,
  kIfWithoutElse,
  kElseIfSplit,
  kWhileCondition,
};

const char* to_string(Template kind);

struct MutexPlan {
  std::string variable;
  std::string mutex_name;
  std::optional<source::TextEdit> decl_insertion;
  bool already_declared = false;
};

enum class GuardOp { kLock, kUnlock, kOther };

// A text edit tagged with what it does to which mutex, so adjacent
// critical sections can be merged.
struct GuardedEdit {
  source::TextEdit edit;
  GuardOp op = GuardOp::kOther;
  std::string mutex;
  // While-loop release points must survive merging, otherwise a loop that
  // waits on another thread would spin holding the lock.
  bool mergeable = true;
};

struct Patch {
  report::DataRace race;
  Template kind = Template::kPlainStatement;
  MutexPlan mutex;
  std::vector<GuardedEdit> edits;
  // Start of the statement the patch anchors on; identifies duplicates.
  std::size_t anchor_byte = 0;
  std::vector<Diagnostic> diagnostics;

  bool empty() const { return edits.empty(); }
};

// Throws Error(kUnknownVariable) when `variable` has no global declaration.
MutexPlan plan_mutex(std::string_view variable, const source::CstNode& tree,
                     std::string_view text);

// The five templates. Each returns an empty patch when the mutex is
// already lexically held at the anchor. `text` is the source the tree
// was parsed from.
Patch fix_plain(const source::StatementHandle& handle, const MutexPlan& mutex,
                std::string_view text);
Patch fix_if_with_else(const source::StatementHandle& handle, const MutexPlan& mutex,
                       std::string_view text);
Patch fix_if_without_else(const source::StatementHandle& handle, const MutexPlan& mutex,
                          std::string_view text);
Patch fix_else_if(const source::StatementHandle& handle, const MutexPlan& mutex,
                  std::string_view text);
Patch fix_while(const source::StatementHandle& handle, const MutexPlan& mutex,
                std::string_view text);

// Picks the template from the handle's role. Throws Error(kUnsupported)
// for unsupported roles.
Patch fix(const source::StatementHandle& handle, const MutexPlan& mutex,
          std::string_view text);

// True when `mutex` is lexically held where the handle's statement starts.
bool is_guarded(const source::StatementHandle& handle, std::string_view mutex);

struct CoalesceResult {
  std::vector<Patch> patches;
  std::vector<Patch> deferred;
  std::vector<Diagnostic> diagnostics;
};

// Drops duplicate patches, defers conflicting ones and merges an unlock
// immediately followed by a lock of the same mutex. Surviving edits are
// left in application order.
CoalesceResult coalesce(std::vector<Patch> patches, std::string_view text);

// Declarations (one per mutex) followed by the patch edits, in the order
// apply_edits expects.
std::vector<source::TextEdit> collect_edits(const std::vector<Patch>& patches);

struct LockIssue {
  std::string function;
  SourceCoord where;
  std::string message;
};

// Walks every function body and checks that, on every path, generated
// mutexes are locked and unlocked alternately and released at exits.
std::vector<LockIssue> check_lock_balance(const source::CstNode& tree,
                                          std::string_view prefix = kMutexPrefix);

}  // namespace racefixer::transform
