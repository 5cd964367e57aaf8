#include <cstdlib>
#include <limits>
#include <sstream>

#include "racefixer/source_model.h"

namespace racefixer::source {
namespace {

using Path = std::vector<const CstNode*>;

void collect(const CstNode& node, std::string_view name, Path& path,
             std::vector<Path>& out) {
  path.push_back(&node);
  if (node.kind == NodeKind::kIdentifier && node.text == name) out.push_back(path);
  for (const auto& child : node.children) collect(child, name, path, out);
  path.pop_back();
}

ParentKind parent_kind_of(const CstNode& node) {
  switch (node.kind) {
    case NodeKind::kCompoundStmt: return ParentKind::kCompoundStmt;
    case NodeKind::kIfStmt: return ParentKind::kIfStmt;
    case NodeKind::kWhileStmt: return ParentKind::kWhileStmt;
    default: return ParentKind::kNone;
  }
}

StatementHandle classify(const Path& path) {
  StatementHandle handle;
  handle.identifier = path.back();

  std::size_t func_index = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i]->kind == NodeKind::kFuncDef) {
      handle.function = path[i];
      func_index = i;
    }
  }

  auto fill_ancestors = [&](std::size_t parent_index) {
    if (!handle.function) return;
    for (std::size_t i = func_index + 1; i <= parent_index; ++i) {
      if (path[i]->is_statement()) handle.ancestors.push_back(path[i]);
    }
  };

  for (std::size_t i = path.size() - 1; i-- > 0;) {
    const CstNode* cur = path[i + 1];
    const CstNode* par = path[i];
    switch (par->kind) {
      case NodeKind::kIfStmt:
        if (if_parts(*par).condition == cur) {
          handle.node = par;
          handle.parent = i > 0 ? path[i - 1] : nullptr;
          handle.parent_kind = handle.parent ? parent_kind_of(*handle.parent) : ParentKind::kNone;
          if (handle.parent && handle.parent->kind == NodeKind::kIfStmt &&
              if_parts(*handle.parent).else_branch == par) {
            handle.role = StatementRole::kElseIfCondition;
            handle.chain_owner = handle.parent;
          } else {
            handle.role = StatementRole::kIfCondition;
          }
          if (i > 0) fill_ancestors(i - 1);
          return handle;
        }
        break;
      case NodeKind::kWhileStmt:
        if (while_parts(*par).condition == cur) {
          handle.node = par;
          handle.parent = i > 0 ? path[i - 1] : nullptr;
          handle.parent_kind = handle.parent ? parent_kind_of(*handle.parent) : ParentKind::kNone;
          handle.role = StatementRole::kWhileCondition;
          if (i > 0) fill_ancestors(i - 1);
          return handle;
        }
        break;
      case NodeKind::kVarDecl:
      case NodeKind::kMutexDecl:
        handle.node = par;
        handle.role = StatementRole::kUnsupported;
        handle.reason = "reference in a global declaration";
        return handle;
      case NodeKind::kFuncDef:
        handle.node = par;
        handle.role = StatementRole::kUnsupported;
        handle.reason = "reference in a function signature";
        return handle;
      default:
        break;
    }
    if (cur->is_statement() && parent_kind_of(*par) != ParentKind::kNone) {
      handle.node = cur;
      handle.parent = par;
      handle.parent_kind = parent_kind_of(*par);
      handle.role = StatementRole::kPlainStatement;
      fill_ancestors(i);
      return handle;
    }
  }
  handle.role = StatementRole::kUnsupported;
  handle.reason = "reference outside any statement";
  return handle;
}

}  // namespace

StatementHandle locate(const CstNode& tree, std::string_view variable, SourceCoord at) {
  std::vector<Path> candidates;
  Path path;
  collect(tree, variable, path, candidates);

  const Path* best = nullptr;
  int best_distance = std::numeric_limits<int>::max();
  for (const auto& p : candidates) {
    const Span& span = p.back()->span;
    if (span.start.line != at.line) continue;
    if (span.start.column <= at.column && at.column < span.end.column) {
      best = &p;
      break;
    }
    const int distance = std::abs(span.start.column - at.column);
    if (distance < best_distance) {
      best_distance = distance;
      best = &p;
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no reference to '" << variable << "' near " << at;
    throw Error(ErrorCode::kNotFound, msg.str());
  }
  return classify(*best);
}

}  // namespace racefixer::source
