#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "racefixer/common.h"

namespace racefixer::source {

// Half-open byte range plus the coordinates of its endpoints.
struct Span {
  std::size_t start_byte = 0;
  std::size_t end_byte = 0;
  SourceCoord start;
  SourceCoord end;

  std::size_t size() const { return end_byte - start_byte; }
  bool empty() const { return start_byte == end_byte; }

  friend bool operator==(const Span&, const Span&) = default;
};

enum class NodeKind {
  kTranslationUnit,
  kVarDecl,
  kMutexDecl,
  kFuncDef,
  kCompoundStmt,
  kExprStmt,
  kIfStmt,
  kWhileStmt,
  kReturnStmt,
  kBreakStmt,
  kContinueStmt,
  kDeclStmt,
  kCallExpr,
  kBinaryExpr,
  kUnaryExpr,
  kAssignExpr,
  kParenExpr,
  kIdentifier,
  kIntLiteral,
  kAddrOf,
  kToken,  // keyword or punctuation leaf
};

const char* to_string(NodeKind kind);

// Lossless concrete syntax tree node. Leaves (kIdentifier, kIntLiteral,
// kToken) carry their text and the whitespace/comments preceding them;
// interior nodes only carry children. The final kToken leaf of a
// translation unit has empty text and holds the trailing trivia.
struct CstNode {
  NodeKind kind = NodeKind::kToken;
  Span span;
  std::vector<CstNode> children;
  std::string text;
  std::string leading_trivia;

  bool is_leaf() const {
    return kind == NodeKind::kIdentifier || kind == NodeKind::kIntLiteral ||
           kind == NodeKind::kToken;
  }
  bool is_token(std::string_view t) const { return kind == NodeKind::kToken && text == t; }
  bool is_statement() const;
  bool is_expression() const;

  // Non-leaf-token children in order (skips kToken punctuation/keywords).
  std::vector<const CstNode*> structural_children() const;
};

class SyntaxError : public Error {
 public:
  SyntaxError(Span span, const std::string& message);
  const Span& span() const { return span_; }

 private:
  Span span_;
};

// Grammar: see README. Throws SyntaxError on the first error.
CstNode parse_source(std::string_view text);

std::string emit(const CstNode& tree);

// Named views over the fixed child layouts produced by the parser.
struct IfParts {
  const CstNode* condition = nullptr;
  const CstNode* then_branch = nullptr;
  const CstNode* else_keyword = nullptr;
  const CstNode* else_branch = nullptr;
};
IfParts if_parts(const CstNode& if_stmt);

struct WhileParts {
  const CstNode* condition = nullptr;
  const CstNode* body = nullptr;
};
WhileParts while_parts(const CstNode& while_stmt);

// Name identifier of a VarDecl/MutexDecl/DeclStmt/FuncDef.
const CstNode* declared_name(const CstNode& decl);
// Thread-start parameter of a FuncDef, or nullptr.
const CstNode* function_parameter(const CstNode& func);
const CstNode* function_body(const CstNode& func);

// Braces of a compound statement.
const CstNode& open_brace(const CstNode& compound);
const CstNode& close_brace(const CstNode& compound);

// Depth-first (pre-order) visit.
template <class Fn>
void visit(const CstNode& node, Fn&& fn) {
  fn(node);
  for (const auto& child : node.children) visit(child, fn);
}

// Maps byte offsets to 1-based coordinates.
class LineMap {
 public:
  explicit LineMap(std::string_view text);
  SourceCoord coord(std::size_t offset) const;
  std::size_t offset(SourceCoord coord) const;
  std::size_t line_count() const { return line_starts_.size(); }

 private:
  std::vector<std::size_t> line_starts_;
  std::size_t size_ = 0;
};

// ---- locating racy statements ----

enum class ParentKind { kCompoundStmt, kIfStmt, kWhileStmt, kNone };
enum class StatementRole {
  kPlainStatement,
  kIfCondition,
  kElseIfCondition,
  kWhileCondition,
  kUnsupported,
};

const char* to_string(StatementRole role);

// Borrowed view into a tree; valid while the tree is alive.
struct StatementHandle {
  // The statement the fix anchors on: the plain statement, or the
  // if/while whose condition holds the reference.
  const CstNode* node = nullptr;
  const CstNode* parent = nullptr;
  ParentKind parent_kind = ParentKind::kNone;
  StatementRole role = StatementRole::kUnsupported;
  const CstNode* identifier = nullptr;
  // For kElseIfCondition: the if statement whose else branch is `node`.
  const CstNode* chain_owner = nullptr;
  // Function body containing the statement (nullptr at top level).
  const CstNode* function = nullptr;
  // Enclosing statements from the function body down to `node`'s parent,
  // innermost last. Used for lexical guard checks.
  std::vector<const CstNode*> ancestors;
  std::string reason;  // why role is kUnsupported
};

// Throws Error(kNotFound) when no identifier named `variable` sits on
// the coordinate's line.
StatementHandle locate(const CstNode& tree, std::string_view variable,
                       SourceCoord at);

// ---- text edits ----

struct TextEdit {
  Span span;  // zero-width for insertion
  std::string replacement;
};

TextEdit insertion_at(std::size_t offset, std::string text);

// Zero-width edits at the same offset are applied in list order.
// Throws Error(kOverlap) when two spans overlap.
std::string apply_edits(std::string_view text, std::vector<TextEdit> edits);

}  // namespace racefixer::source
