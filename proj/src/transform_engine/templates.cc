#include <algorithm>

#include "racefixer/transform_engine.h"

namespace racefixer::transform {
namespace {

using source::CstNode;
using source::NodeKind;
using source::StatementHandle;
using source::StatementRole;

std::string lock_call(const std::string& m) { return "pthread_mutex_lock(&" + m + ");"; }
std::string unlock_call(const std::string& m) { return "pthread_mutex_unlock(&" + m + ");"; }

// Leading whitespace of the line containing `offset`.
std::string line_indent(std::string_view text, std::size_t offset) {
  std::size_t start = std::min(offset, text.size());
  while (start > 0 && text[start - 1] != '\n') --start;
  std::size_t end = start;
  while (end < text.size() && (text[end] == ' ' || text[end] == '\t')) ++end;
  return std::string(text.substr(start, end - start));
}

// Smallest non-empty indentation in the file, or four spaces.
std::string indent_unit(std::string_view text) {
  std::size_t best = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = pos;
    while (end < text.size() && (text[end] == ' ' || text[end] == '\t')) ++end;
    const bool blank = end >= text.size() || text[end] == '\n' || text[end] == '\r';
    if (!blank && end > pos) {
      if (text[pos] == '\t') return "\t";
      if (best == 0 || end - pos < best) best = end - pos;
    }
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return best == 0 ? std::string(4, ' ') : std::string(best, ' ');
}

std::string source_text(std::string_view text, const CstNode& node) {
  return std::string(text.substr(node.span.start_byte, node.span.size()));
}

// Indentation for statements inside a braced block.
std::string inner_indent(std::string_view text, const CstNode& block, const std::string& outer) {
  const auto stmts = block.structural_children();
  if (!stmts.empty()) {
    const std::size_t start = stmts.front()->span.start_byte;
    if (stmts.front()->span.start.line != source::open_brace(block).span.start.line) {
      return line_indent(text, start);
    }
  }
  return outer + indent_unit(text);
}

GuardedEdit make(source::TextEdit edit, GuardOp op, const std::string& mutex, bool mergeable = true) {
  return GuardedEdit{std::move(edit), op, mutex, mergeable};
}

GuardedEdit lock_before(std::size_t offset, const std::string& indent, const std::string& m,
                        bool mergeable = true) {
  return make(source::insertion_at(offset, std::string(kLockMarker) + "\n" + indent + lock_call(m) +
                                               "\n" + indent),
              GuardOp::kLock, m, mergeable);
}

GuardedEdit unlock_after(std::size_t offset, const std::string& indent, const std::string& m,
                         bool mergeable = true) {
  return make(source::insertion_at(offset, "\n" + indent + std::string(kUnlockMarker) + "\n" +
                                               indent + unlock_call(m)),
              GuardOp::kUnlock, m, mergeable);
}

GuardedEdit unlock_at_block_start(const CstNode& block, const std::string& inner,
                                  const std::string& m, bool mergeable = true) {
  return unlock_after(source::open_brace(block).span.end_byte, inner, m, mergeable);
}

GuardedEdit lock_at_block_end(const CstNode& block, const std::string& inner, const std::string& m,
                              bool mergeable = true) {
  const CstNode& close = source::close_brace(block);
  const std::size_t offset = close.span.start_byte - close.leading_trivia.size();
  return make(source::insertion_at(offset, "\n" + inner + std::string(kLockMarker) + "\n" + inner +
                                               lock_call(m)),
              GuardOp::kLock, m, mergeable);
}

std::string unlock_lines(const std::string& inner, const std::string& m) {
  return inner + std::string(kUnlockMarker) + "\n" + inner + unlock_call(m) + "\n";
}

std::string lock_lines(const std::string& inner, const std::string& m) {
  return inner + std::string(kLockMarker) + "\n" + inner + lock_call(m) + "\n";
}

std::string synthesized_else(const std::string& indent, const std::string& inner,
                             const std::string& m) {
  return " else {\n" + unlock_lines(inner, m) + indent + "}";
}

// Wraps an unbraced statement in braces. Whitespace separating it from
// the preceding token is absorbed so the brace lands on the header line.
source::TextEdit brace(std::string_view text, const CstNode& stmt, const std::string& indent,
                       const std::string& before, const std::string& after) {
  std::size_t start = stmt.span.start_byte;
  while (start > 0 && (text[start - 1] == ' ' || text[start - 1] == '\t' ||
                       text[start - 1] == '\n' || text[start - 1] == '\r')) {
    --start;
  }
  const std::string inner = indent + indent_unit(text);
  source::TextEdit edit;
  edit.span = stmt.span;
  edit.span.start_byte = start;
  edit.span.start = source::LineMap(text).coord(start);
  edit.replacement = " {\n" + before + inner + source_text(text, stmt) + "\n" + after + indent + "}";
  return edit;
}

Patch start_patch(Template kind, const StatementHandle& handle, const MutexPlan& mutex) {
  Patch patch;
  patch.kind = kind;
  patch.mutex = mutex;
  patch.anchor_byte = handle.node->span.start_byte;
  return patch;
}

// Branch of an if statement: unlock as its first statement, bracing it
// when needed.
void unlock_in_branch(Patch& patch, std::string_view text, const CstNode& branch,
                      const std::string& indent, const std::string& m) {
  if (branch.kind == NodeKind::kCompoundStmt) {
    patch.edits.push_back(unlock_at_block_start(branch, inner_indent(text, branch, indent), m));
    return;
  }
  const std::string inner = indent + indent_unit(text);
  patch.edits.push_back(make(brace(text, branch, indent, unlock_lines(inner, m), ""),
                             GuardOp::kOther, m));
}

// Unlock at the start of the then-branch plus a synthesized else that
// only unlocks.
void unlock_then_and_synthesize_else(Patch& patch, std::string_view text, const CstNode& then,
                                     const std::string& indent, const std::string& m) {
  const std::string inner = indent + indent_unit(text);
  if (then.kind == NodeKind::kCompoundStmt) {
    patch.edits.push_back(unlock_at_block_start(then, inner_indent(text, then, indent), m));
    patch.edits.push_back(make(source::insertion_at(then.span.end_byte,
                                                    synthesized_else(indent, inner, m)),
                               GuardOp::kOther, m));
    return;
  }
  source::TextEdit edit = brace(text, then, indent, unlock_lines(inner, m), "");
  edit.replacement += synthesized_else(indent, inner, m);
  patch.edits.push_back(make(std::move(edit), GuardOp::kOther, m));
}

void require_role(const StatementHandle& handle, std::initializer_list<StatementRole> roles,
                  const char* what) {
  if (std::find(roles.begin(), roles.end(), handle.role) == roles.end() || !handle.node) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " called on a handle with role " + source::to_string(handle.role));
  }
}

// break/continue that leave this loop, or any return.
const CstNode* find_loop_escape(const CstNode& node, bool nested_loop) {
  if (node.kind == NodeKind::kReturnStmt) return &node;
  if (!nested_loop && (node.kind == NodeKind::kBreakStmt || node.kind == NodeKind::kContinueStmt)) {
    return &node;
  }
  for (const auto& child : node.children) {
    if (const CstNode* hit = find_loop_escape(child, nested_loop || node.kind == NodeKind::kWhileStmt)) {
      return hit;
    }
  }
  return nullptr;
}

}  // namespace

std::string mutex_name_for(std::string_view variable) {
  return std::string(kMutexPrefix) + std::string(variable);
}

const char* to_string(Template kind) {
  switch (kind) {
    case Template::kPlainStatement: return "PlainStatement";
    case Template::kIfWithElse: return "IfWithElse";
    case Template::kIfWithoutElse: return "IfWithoutElse";
    case Template::kElseIfSplit: return "ElseIfSplit";
    case Template::kWhileCondition: return "WhileCondition";
  }
  return "?";
}

MutexPlan plan_mutex(std::string_view variable, const CstNode& tree, std::string_view text) {
  MutexPlan plan;
  plan.variable = std::string(variable);
  plan.mutex_name = mutex_name_for(variable);

  const CstNode* decl = nullptr;
  for (const auto& item : tree.children) {
    const CstNode* name = source::declared_name(item);
    if (!name) continue;
    if (item.kind == NodeKind::kMutexDecl && name->text == plan.mutex_name) {
      plan.already_declared = true;
      return plan;
    }
    if (item.kind == NodeKind::kVarDecl && name->text == variable && !decl) decl = &item;
  }
  if (!decl) {
    throw Error(ErrorCode::kUnknownVariable,
                "no global declaration of '" + std::string(variable) + "'");
  }

  const std::string line = "pthread_mutex_t " + plan.mutex_name + " = PTHREAD_MUTEX_INITIALIZER;";
  // Insert at the start of the line after the declaration, skipping any
  // trailing comment on the declaration's line.
  std::size_t pos = decl->span.end_byte;
  while (pos < text.size()) {
    if (text[pos] == '\n') {
      plan.decl_insertion = source::insertion_at(pos + 1, line + "\n");
      return plan;
    }
    if (text.substr(pos, 2) == "//") {
      pos = text.find('\n', pos);
      if (pos == std::string_view::npos) pos = text.size();
      continue;
    }
    if (text.substr(pos, 2) == "/*") {
      const auto close = text.find("*/", pos + 2);
      pos = close == std::string_view::npos ? text.size() : close + 2;
      continue;
    }
    if (text[pos] != ' ' && text[pos] != '\t' && text[pos] != '\r') break;
    ++pos;
  }
  plan.decl_insertion = source::insertion_at(decl->span.end_byte, "\n" + line);
  return plan;
}

Patch fix_plain(const StatementHandle& handle, const MutexPlan& mutex, std::string_view text) {
  require_role(handle, {StatementRole::kPlainStatement}, "fix_plain");
  const CstNode& stmt = *handle.node;
  if (stmt.kind == NodeKind::kReturnStmt) {
    throw Error(ErrorCode::kUnsupportedControlFlow,
                "cannot release a lock after 'return' at line " + std::to_string(stmt.span.start.line));
  }
  Patch patch = start_patch(Template::kPlainStatement, handle, mutex);
  if (is_guarded(handle, mutex.mutex_name)) return patch;

  const std::string& m = mutex.mutex_name;
  if (handle.parent_kind == source::ParentKind::kCompoundStmt) {
    const std::string indent = line_indent(text, stmt.span.start_byte);
    patch.edits.push_back(lock_before(stmt.span.start_byte, indent, m));
    patch.edits.push_back(unlock_after(stmt.span.end_byte, indent, m));
    return patch;
  }
  // Unbraced if/while body: brace it first.
  const std::string indent = line_indent(text, handle.parent->span.start_byte);
  const std::string inner = indent + indent_unit(text);
  patch.edits.push_back(make(brace(text, stmt, indent, lock_lines(inner, m), unlock_lines(inner, m)),
                             GuardOp::kOther, m));
  return patch;
}

Patch fix_if_with_else(const StatementHandle& handle, const MutexPlan& mutex,
                       std::string_view text) {
  require_role(handle, {StatementRole::kIfCondition}, "fix_if_with_else");
  const auto parts = source::if_parts(*handle.node);
  if (!parts.else_branch) {
    throw Error(ErrorCode::kInvalidArgument, "fix_if_with_else on an if without else");
  }
  Patch patch = start_patch(Template::kIfWithElse, handle, mutex);
  if (is_guarded(handle, mutex.mutex_name)) return patch;

  const std::string& m = mutex.mutex_name;
  const std::string indent = line_indent(text, handle.node->span.start_byte);
  patch.edits.push_back(lock_before(handle.node->span.start_byte, indent, m));
  unlock_in_branch(patch, text, *parts.then_branch, indent, m);
  unlock_in_branch(patch, text, *parts.else_branch, indent, m);
  return patch;
}

Patch fix_if_without_else(const StatementHandle& handle, const MutexPlan& mutex,
                          std::string_view text) {
  require_role(handle, {StatementRole::kIfCondition}, "fix_if_without_else");
  const auto parts = source::if_parts(*handle.node);
  if (parts.else_branch) {
    throw Error(ErrorCode::kInvalidArgument, "fix_if_without_else on an if with an else branch");
  }
  Patch patch = start_patch(Template::kIfWithoutElse, handle, mutex);
  if (is_guarded(handle, mutex.mutex_name)) return patch;

  const std::string& m = mutex.mutex_name;
  const std::string indent = line_indent(text, handle.node->span.start_byte);
  patch.edits.push_back(lock_before(handle.node->span.start_byte, indent, m));
  unlock_then_and_synthesize_else(patch, text, *parts.then_branch, indent, m);
  return patch;
}

Patch fix_else_if(const StatementHandle& handle, const MutexPlan& mutex, std::string_view text) {
  require_role(handle, {StatementRole::kElseIfCondition}, "fix_else_if");
  const CstNode& inner_if = *handle.node;
  const auto owner = source::if_parts(*handle.chain_owner);
  const auto parts = source::if_parts(inner_if);

  Patch patch = start_patch(Template::kElseIfSplit, handle, mutex);
  const std::string& m = mutex.mutex_name;
  const std::string indent = line_indent(text, owner.else_keyword->span.start_byte);

  // Drop "else" so the racy link becomes a separate statement preceded by
  // the lock.
  source::TextEdit split;
  split.span.start_byte = owner.then_branch->span.end_byte;
  split.span.end_byte = inner_if.span.start_byte;
  split.span.start = owner.then_branch->span.end;
  split.span.end = inner_if.span.start;
  split.replacement = "\n" + indent + std::string(kLockMarker) + "\n" + indent + lock_call(m) +
                      "\n" + indent;
  patch.edits.push_back(make(std::move(split), GuardOp::kOther, m));

  if (parts.else_branch) {
    unlock_in_branch(patch, text, *parts.then_branch, indent, m);
    unlock_in_branch(patch, text, *parts.else_branch, indent, m);
  } else {
    unlock_then_and_synthesize_else(patch, text, *parts.then_branch, indent, m);
  }
  patch.diagnostics.push_back(
      {Severity::kWarning, "SemanticsChanged",
       "splitting the else-if at line " + std::to_string(inner_if.span.start.line) +
           " evaluates its condition even when an earlier condition holds"});
  return patch;
}

Patch fix_while(const StatementHandle& handle, const MutexPlan& mutex, std::string_view text) {
  require_role(handle, {StatementRole::kWhileCondition}, "fix_while");
  const auto parts = source::while_parts(*handle.node);
  if (const CstNode* escape = find_loop_escape(*parts.body, false)) {
    throw Error(ErrorCode::kUnsupportedControlFlow,
                std::string("loop body leaves through '") + escape->children.front().text +
                    "' at line " + std::to_string(escape->span.start.line));
  }
  Patch patch = start_patch(Template::kWhileCondition, handle, mutex);
  if (is_guarded(handle, mutex.mutex_name)) return patch;

  const std::string& m = mutex.mutex_name;
  const CstNode& loop = *handle.node;
  const std::string indent = line_indent(text, loop.span.start_byte);
  patch.edits.push_back(lock_before(loop.span.start_byte, indent, m, false));
  if (parts.body->kind == NodeKind::kCompoundStmt) {
    const std::string inner = inner_indent(text, *parts.body, indent);
    patch.edits.push_back(unlock_at_block_start(*parts.body, inner, m, false));
    patch.edits.push_back(lock_at_block_end(*parts.body, inner, m, false));
  } else {
    const std::string inner = indent + indent_unit(text);
    patch.edits.push_back(make(brace(text, *parts.body, indent, unlock_lines(inner, m),
                                     lock_lines(inner, m)),
                               GuardOp::kOther, m, false));
  }
  patch.edits.push_back(unlock_after(loop.span.end_byte, indent, m, false));
  return patch;
}

Patch fix(const StatementHandle& handle, const MutexPlan& mutex, std::string_view text) {
  switch (handle.role) {
    case StatementRole::kPlainStatement:
      return fix_plain(handle, mutex, text);
    case StatementRole::kIfCondition:
      return source::if_parts(*handle.node).else_branch ? fix_if_with_else(handle, mutex, text)
                                                         : fix_if_without_else(handle, mutex, text);
    case StatementRole::kElseIfCondition:
      return fix_else_if(handle, mutex, text);
    case StatementRole::kWhileCondition:
      return fix_while(handle, mutex, text);
    case StatementRole::kUnsupported:
      break;
  }
  throw Error(ErrorCode::kUnsupported,
              handle.reason.empty() ? "unsupported statement context" : handle.reason);
}

}  // namespace racefixer::transform
