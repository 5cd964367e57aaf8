#include <algorithm>

#include "racefixer/source_model.h"

namespace racefixer::source {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kTranslationUnit: return "TranslationUnit";
    case NodeKind::kVarDecl: return "VarDecl";
    case NodeKind::kMutexDecl: return "MutexDecl";
    case NodeKind::kFuncDef: return "FuncDef";
    case NodeKind::kCompoundStmt: return "CompoundStmt";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kIfStmt: return "IfStmt";
    case NodeKind::kWhileStmt: return "WhileStmt";
    case NodeKind::kReturnStmt: return "ReturnStmt";
    case NodeKind::kBreakStmt: return "BreakStmt";
    case NodeKind::kContinueStmt: return "ContinueStmt";
    case NodeKind::kDeclStmt: return "DeclStmt";
    case NodeKind::kCallExpr: return "CallExpr";
    case NodeKind::kBinaryExpr: return "BinaryExpr";
    case NodeKind::kUnaryExpr: return "UnaryExpr";
    case NodeKind::kAssignExpr: return "AssignExpr";
    case NodeKind::kParenExpr: return "ParenExpr";
    case NodeKind::kIdentifier: return "Identifier";
    case NodeKind::kIntLiteral: return "IntLiteral";
    case NodeKind::kAddrOf: return "AddrOf";
    case NodeKind::kToken: return "Token";
  }
  return "?";
}

const char* to_string(StatementRole role) {
  switch (role) {
    case StatementRole::kPlainStatement: return "PlainStatement";
    case StatementRole::kIfCondition: return "IfCondition";
    case StatementRole::kElseIfCondition: return "ElseIfCondition";
    case StatementRole::kWhileCondition: return "WhileCondition";
    case StatementRole::kUnsupported: return "Unsupported";
  }
  return "?";
}

bool CstNode::is_statement() const {
  switch (kind) {
    case NodeKind::kCompoundStmt:
    case NodeKind::kExprStmt:
    case NodeKind::kIfStmt:
    case NodeKind::kWhileStmt:
    case NodeKind::kReturnStmt:
    case NodeKind::kBreakStmt:
    case NodeKind::kContinueStmt:
    case NodeKind::kDeclStmt:
      return true;
    default:
      return false;
  }
}

bool CstNode::is_expression() const {
  switch (kind) {
    case NodeKind::kCallExpr:
    case NodeKind::kBinaryExpr:
    case NodeKind::kUnaryExpr:
    case NodeKind::kAssignExpr:
    case NodeKind::kParenExpr:
    case NodeKind::kIdentifier:
    case NodeKind::kIntLiteral:
    case NodeKind::kAddrOf:
      return true;
    default:
      return false;
  }
}

std::vector<const CstNode*> CstNode::structural_children() const {
  std::vector<const CstNode*> out;
  for (const auto& child : children) {
    if (child.kind != NodeKind::kToken) out.push_back(&child);
  }
  return out;
}

namespace {

void emit_into(const CstNode& node, std::string& out) {
  if (node.is_leaf()) {
    out += node.leading_trivia;
    out += node.text;
    return;
  }
  for (const auto& child : node.children) emit_into(child, out);
}

}  // namespace

std::string emit(const CstNode& tree) {
  std::string out;
  emit_into(tree, out);
  return out;
}

IfParts if_parts(const CstNode& if_stmt) {
  // if ( cond ) then [else stmt]
  IfParts parts;
  const auto& c = if_stmt.children;
  parts.condition = &c.at(2);
  parts.then_branch = &c.at(4);
  if (c.size() > 5) {
    parts.else_keyword = &c.at(5);
    parts.else_branch = &c.at(6);
  }
  return parts;
}

WhileParts while_parts(const CstNode& while_stmt) {
  return {&while_stmt.children.at(2), &while_stmt.children.at(4)};
}

const CstNode* declared_name(const CstNode& decl) {
  for (const auto& child : decl.children) {
    if (child.kind == NodeKind::kIdentifier) return &child;
  }
  return nullptr;
}

const CstNode* function_parameter(const CstNode& func) {
  int seen = 0;
  for (const auto& child : func.children) {
    if (child.kind == NodeKind::kIdentifier && ++seen == 2) return &child;
  }
  return nullptr;
}

const CstNode* function_body(const CstNode& func) {
  return func.children.empty() ? nullptr : &func.children.back();
}

const CstNode& open_brace(const CstNode& compound) { return compound.children.front(); }
const CstNode& close_brace(const CstNode& compound) { return compound.children.back(); }

LineMap::LineMap(std::string_view text) : size_(text.size()) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') line_starts_.push_back(i + 1);
  }
}

SourceCoord LineMap::coord(std::size_t offset) const {
  offset = std::min(offset, size_);
  const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  const auto line = static_cast<std::size_t>(it - line_starts_.begin());
  return {static_cast<int>(line), static_cast<int>(offset - line_starts_[line - 1] + 1)};
}

std::size_t LineMap::offset(SourceCoord coord) const {
  if (coord.line < 1) return 0;
  if (static_cast<std::size_t>(coord.line) > line_starts_.size()) return size_;
  return std::min(size_, line_starts_[coord.line - 1] + static_cast<std::size_t>(coord.column - 1));
}

}  // namespace racefixer::source
