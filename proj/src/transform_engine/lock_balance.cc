#include "lock_walk.h"
#include "racefixer/transform_engine.h"

namespace racefixer::transform {
namespace detail {

using source::CstNode;
using source::NodeKind;

std::optional<std::string> mutex_call(const CstNode& call, bool& is_lock) {
  if (call.kind != NodeKind::kCallExpr) return std::nullopt;
  const std::string& callee = call.children.front().text;
  if (callee != "pthread_mutex_lock" && callee != "pthread_mutex_unlock") return std::nullopt;
  const auto args = call.structural_children();
  // args[0] is the callee identifier.
  if (args.size() != 2 || args[1]->kind != NodeKind::kAddrOf) return std::nullopt;
  is_lock = callee == "pthread_mutex_lock";
  return args[1]->children.back().text;
}

void LockWalker::expression(const CstNode& expr, HeldSet& held) {
  for (const auto& child : expr.children) {
    if (!child.is_leaf()) expression(child, held);
  }
  bool is_lock = false;
  const auto name = mutex_call(expr, is_lock);
  if (!name || !track_(*name)) return;
  if (is_lock) {
    if (held.contains(*name)) issue(expr, "lock of '" + *name + "' while already held");
    held.insert(*name);
  } else {
    if (!held.contains(*name)) issue(expr, "unlock of '" + *name + "' that is not held");
    held.erase(*name);
  }
}

FlowState LockWalker::statement(const CstNode& stmt, FlowState in) {
  if (!in) return in;
  if (on_statement_) on_statement_(stmt, *in);
  HeldSet held = *in;
  switch (stmt.kind) {
    case NodeKind::kCompoundStmt: {
      FlowState state = std::move(held);
      for (const CstNode* child : stmt.structural_children()) {
        state = statement(*child, std::move(state));
      }
      return state;
    }
    case NodeKind::kIfStmt: {
      const auto parts = source::if_parts(stmt);
      expression(*parts.condition, held);
      FlowState then_out = statement(*parts.then_branch, held);
      FlowState else_out = parts.else_branch ? statement(*parts.else_branch, held) : FlowState(held);
      if (!then_out) return else_out;
      if (!else_out) return then_out;
      if (*then_out != *else_out) issue(stmt, "branches leave different locks held");
      return then_out;
    }
    case NodeKind::kWhileStmt: {
      const auto parts = source::while_parts(stmt);
      expression(*parts.condition, held);
      loop_entries_.push_back(held);
      FlowState body_out = statement(*parts.body, held);
      loop_entries_.pop_back();
      if (body_out && *body_out != held) {
        issue(stmt, "loop body does not restore the lock state of the loop head");
      }
      return held;
    }
    case NodeKind::kReturnStmt:
      for (const CstNode* child : stmt.structural_children()) expression(*child, held);
      if (!held.empty()) issue(stmt, "return while holding '" + *held.begin() + "'");
      return std::nullopt;
    case NodeKind::kBreakStmt:
    case NodeKind::kContinueStmt:
      if (!loop_entries_.empty() && held != loop_entries_.back()) {
        issue(stmt, "loop exit with a different lock state than the loop head");
      }
      return std::nullopt;
    default:
      for (const CstNode* child : stmt.structural_children()) expression(*child, held);
      return held;
  }
}

FlowState LockWalker::walk_function(const CstNode& func) {
  loop_entries_.clear();
  return statement(*source::function_body(func), HeldSet{});
}

}  // namespace detail

std::vector<LockIssue> check_lock_balance(const source::CstNode& tree, std::string_view prefix) {
  std::vector<LockIssue> issues;
  for (const auto& item : tree.children) {
    if (item.kind != source::NodeKind::kFuncDef) continue;
    const std::string name = source::declared_name(item)->text;
    detail::LockWalker walker(
        [&](std::string_view m) { return m.starts_with(prefix); }, nullptr,
        [&](const source::CstNode& at, const std::string& message) {
          issues.push_back({name, at.span.start, message});
        });
    const auto out = walker.walk_function(item);
    if (out && !out->empty()) {
      issues.push_back({name, source::close_brace(*source::function_body(item)).span.start,
                        "function ends holding '" + *out->begin() + "'"});
    }
  }
  return issues;
}

}  // namespace racefixer::transform
