#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "racefixer/source_model.h"

namespace racefixer::transform::detail {

using HeldSet = std::set<std::string, std::less<>>;
// nullopt marks unreachable code (after return/break/continue).
using FlowState = std::optional<HeldSet>;

// If `call` is pthread_mutex_lock/unlock(&NAME), returns NAME and sets
// `is_lock`.
std::optional<std::string> mutex_call(const source::CstNode& call, bool& is_lock);

// Forward abstract walk of a function body tracking which mutexes (those
// accepted by `track`) are held.
class LockWalker {
 public:
  using StatementHook = std::function<void(const source::CstNode&, const HeldSet&)>;
  using IssueHook = std::function<void(const source::CstNode&, const std::string&)>;

  LockWalker(std::function<bool(std::string_view)> track, StatementHook on_statement,
             IssueHook on_issue)
      : track_(std::move(track)),
        on_statement_(std::move(on_statement)),
        on_issue_(std::move(on_issue)) {}

  // Returns the state at the end of the body.
  FlowState walk_function(const source::CstNode& func);

 private:
  FlowState statement(const source::CstNode& stmt, FlowState in);
  void expression(const source::CstNode& expr, HeldSet& held);
  void issue(const source::CstNode& at, const std::string& message) {
    if (on_issue_) on_issue_(at, message);
  }

  std::function<bool(std::string_view)> track_;
  StatementHook on_statement_;
  IssueHook on_issue_;
  std::vector<HeldSet> loop_entries_;
};

}  // namespace racefixer::transform::detail
