#include <random>

#include <gtest/gtest.h>

#include "files.h"
#include "program_gen.h"
#include "racefixer/source_model.h"

namespace {

using namespace racefixer;
using namespace racefixer::source;

std::vector<const CstNode*> items(const CstNode& tu, NodeKind kind) {
  std::vector<const CstNode*> out;
  for (const auto& child : tu.children) {
    if (child.kind == kind) out.push_back(&child);
  }
  return out;
}

const char* kTwoThreads =
    "int Global;\n"
    "void *Thread1(void *x) {\n"
    "  Global = Global + 1;\n"
    "  return 0;\n"
    "}\n"
    "int main() {\n"
    "  pthread_t t;\n"
    "  pthread_create(&t, 0, Thread1, 0);\n"
    "  Global = Global + 1;\n"
    "  pthread_join(t, 0);\n"
    "  return Global;\n"
    "}\n";

TEST(ParseSource, SingleDeclaration) {
  const CstNode tu = parse_source("int x;\n");
  EXPECT_EQ(tu.kind, NodeKind::kTranslationUnit);
  const auto decls = items(tu, NodeKind::kVarDecl);
  ASSERT_EQ(decls.size(), 1u);
  EXPECT_EQ(declared_name(*decls.front())->text, "x");
  EXPECT_EQ(emit(tu), "int x;\n");
}

TEST(ParseSource, TwoThreadProgramShape) {
  const CstNode tu = parse_source(kTwoThreads);
  EXPECT_EQ(items(tu, NodeKind::kVarDecl).size(), 1u);
  const auto funcs = items(tu, NodeKind::kFuncDef);
  ASSERT_EQ(funcs.size(), 2u);
  EXPECT_EQ(declared_name(*funcs[0])->text, "Thread1");
  ASSERT_NE(function_parameter(*funcs[0]), nullptr);
  EXPECT_EQ(function_parameter(*funcs[0])->text, "x");
  EXPECT_EQ(declared_name(*funcs[1])->text, "main");
  EXPECT_EQ(function_parameter(*funcs[1]), nullptr);
  EXPECT_EQ(function_body(*funcs[1])->structural_children().size(), 5u);
}

TEST(ParseSource, MissingDeclaratorReportsPosition) {
  try {
    parse_source("int = 3;");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.span().start, (SourceCoord{1, 5}));
    EXPECT_EQ(e.code(), ErrorCode::kSyntax);
  }
}

TEST(ParseSource, RejectsMalformedInput) {
  for (const char* bad : {"int x", "int main() { x = ; }", "/* open", "int main() { if x) {} }",
                          "void *f(void *a) { return 0; ", "int main() { 3 = x; }", "#include <a.h>\n",
                          "int main() { x = 1 @ 2; }", "pthread_mutex_t m;"}) {
    EXPECT_THROW(parse_source(bad), SyntaxError) << bad;
  }
}

TEST(ParseSource, OperatorPrecedenceAndAssociativity) {
  const CstNode tu = parse_source("int main() { x = a || b && c == d < e + f * -g; }");
  // Walk down the right spine: || then && then == then < then + then *.
  const CstNode& stmt = *function_body(tu.children.front())->structural_children().front();
  const CstNode* e = &stmt.children.front().children.at(2);
  for (const char* op : {"||", "&&", "==", "<", "+", "*"}) {
    ASSERT_EQ(e->kind, NodeKind::kBinaryExpr) << op;
    EXPECT_EQ(e->children.at(1).text, op);
    e = &e->children.at(2);
  }
  EXPECT_EQ(e->kind, NodeKind::kUnaryExpr);
}

TEST(ParseSource, ElseIfChainNests) {
  const CstNode tu =
      parse_source("int main() { if (a) x = 1; else if (b) x = 2; else x = 3; return x; }");
  const CstNode& outer = *function_body(tu.children.front())->structural_children().front();
  const auto parts = if_parts(outer);
  ASSERT_NE(parts.else_branch, nullptr);
  EXPECT_EQ(parts.else_branch->kind, NodeKind::kIfStmt);
  EXPECT_NE(if_parts(*parts.else_branch).else_branch, nullptr);
}

void check_spans(const CstNode& node, std::string_view text, const LineMap& lines) {
  if (node.is_leaf()) {
    EXPECT_EQ(text.substr(node.span.start_byte, node.span.size()), node.text);
    EXPECT_EQ(lines.coord(node.span.start_byte), node.span.start);
    EXPECT_EQ(text.substr(node.span.start_byte - node.leading_trivia.size(),
                          node.leading_trivia.size()),
              node.leading_trivia);
  }
  for (const auto& child : node.children) check_spans(child, text, lines);
}

TEST(Losslessness, FixtureCorpus) {
  const auto files = rftest::fixture_files();
  ASSERT_GE(files.size(), 20u);
  for (const auto& path : files) {
    const std::string text = rftest::read_file(path);
    const CstNode tu = parse_source(text);
    EXPECT_EQ(emit(tu), text) << path;
    check_spans(tu, text, LineMap(text));
  }
}

TEST(Losslessness, RandomPrograms) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 200; ++i) {
    rftest::GenOptions o;
    o.workers = i % 3;
    o.globals = 1 + i % 3;
    o.statements = 2 + i % 5;
    o.noise = true;
    const std::string text = rftest::random_program(rng, o);
    CstNode tu;
    ASSERT_NO_THROW(tu = parse_source(text)) << text;
    EXPECT_EQ(emit(tu), text);
    check_spans(tu, text, LineMap(text));
  }
}

TEST(LineMap, RoundTrip) {
  const std::string text = "ab\n\ncde\nf";
  const LineMap lines(text);
  for (std::size_t i = 0; i <= text.size(); ++i) EXPECT_EQ(lines.offset(lines.coord(i)), i);
  EXPECT_EQ(lines.coord(4), (SourceCoord{3, 1}));
  EXPECT_EQ(lines.line_count(), 4u);
}

const char* kLocateProgram =
    "int Global;\n"
    "int Other;\n"
    "\n"
    "void *Thread1(void *x) {\n"
    "  Global = 42;\n"
    "  while (Global < 10) {\n"
    "    Other = 1;\n"
    "  }\n"
    "  if (Other == 1) {\n"
    "    Other = 2;\n"
    "  } else if (Global == 3) {\n"
    "    Other = 3;\n"
    "  }\n"
    "  return Global;\n"
    "}\n";

TEST(Locate, PlainStatementFromExpressionColumn) {
  const CstNode tu = parse_source(kLocateProgram);
  // Column 10 is the '=' of "  Global = 42;"; the identifier starts at 3.
  const auto h = locate(tu, "Global", {5, 10});
  EXPECT_EQ(h.role, StatementRole::kPlainStatement);
  ASSERT_NE(h.node, nullptr);
  EXPECT_EQ(h.node->kind, NodeKind::kExprStmt);
  EXPECT_EQ(h.node->span.start, (SourceCoord{5, 3}));
  EXPECT_EQ(h.parent_kind, ParentKind::kCompoundStmt);
  EXPECT_EQ(h.identifier->span.start, (SourceCoord{5, 3}));
}

TEST(Locate, ConditionRoles) {
  const CstNode tu = parse_source(kLocateProgram);
  const auto w = locate(tu, "Global", {6, 10});
  EXPECT_EQ(w.role, StatementRole::kWhileCondition);
  EXPECT_EQ(w.node->kind, NodeKind::kWhileStmt);
  const auto i = locate(tu, "Other", {9, 7});
  EXPECT_EQ(i.role, StatementRole::kIfCondition);
  const auto e = locate(tu, "Global", {11, 14});
  EXPECT_EQ(e.role, StatementRole::kElseIfCondition);
  ASSERT_NE(e.chain_owner, nullptr);
  EXPECT_EQ(e.chain_owner->span.start, (SourceCoord{9, 3}));
  // Statement inside a while body.
  const auto b = locate(tu, "Other", {7, 5});
  EXPECT_EQ(b.role, StatementRole::kPlainStatement);
  EXPECT_EQ(b.ancestors.size(), 3u);  // function body, while, loop body
  const auto r = locate(tu, "Global", {14, 10});
  EXPECT_EQ(r.node->kind, NodeKind::kReturnStmt);
}

TEST(Locate, NotFoundAndUnsupported) {
  const CstNode tu = parse_source("int x;\n");
  try {
    locate(tu, "Nope", {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  // Identifier on another line does not count.
  const CstNode two = parse_source(kLocateProgram);
  EXPECT_THROW(locate(two, "Global", {3, 1}), Error);
  const auto g = locate(parse_source("int a;\nint b = a;\n"), "a", {2, 9});
  EXPECT_EQ(g.role, StatementRole::kUnsupported);
  EXPECT_FALSE(g.reason.empty());
}

TEST(Locate, Deterministic) {
  const CstNode tu = parse_source(kLocateProgram);
  for (int line = 1; line <= 15; ++line) {
    for (int col = 1; col <= 20; ++col) {
      for (const char* var : {"Global", "Other"}) {
        try {
          const auto a = locate(tu, var, {line, col});
          const auto b = locate(tu, var, {line, col});
          EXPECT_EQ(a.node, b.node);
          EXPECT_EQ(a.identifier, b.identifier);
          EXPECT_EQ(a.role, b.role);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kNotFound);
        }
      }
    }
  }
}

TEST(ApplyEdits, Examples) {
  EXPECT_EQ(apply_edits("abc", {}), "abc");
  EXPECT_EQ(apply_edits("abc", {insertion_at(0, "x")}), "xabc");
  EXPECT_EQ(apply_edits("abcdef", {insertion_at(3, "Y"), insertion_at(0, "X")}), "XabcYdef");
  // Same offset keeps list order.
  EXPECT_EQ(apply_edits("ab", {insertion_at(1, "1"), insertion_at(1, "2")}), "a12b");
  TextEdit r1;
  r1.span.start_byte = 1;
  r1.span.end_byte = 4;
  r1.replacement = "Q";
  TextEdit r2 = r1;
  r2.span.start_byte = 3;
  r2.span.end_byte = 5;
  EXPECT_EQ(apply_edits("abcdef", {r1}), "aQef");
  try {
    apply_edits("abcdef", {r1, r2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverlap);
  }
}

TEST(ApplyEdits, SingleInsertionLocality) {
  std::mt19937 rng(5);
  const std::string text = rftest::read_file(rftest::fixture("while_condition.c"));
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, text.size())(rng);
    const std::string ins(std::uniform_int_distribution<int>(0, 5)(rng), 'z');
    const std::string out = apply_edits(text, {insertion_at(k, ins)});
    ASSERT_EQ(out.size(), text.size() + ins.size());
    EXPECT_EQ(out.substr(0, k), text.substr(0, k));
    EXPECT_EQ(out.substr(k + ins.size()), text.substr(k));
  }
}

}  // namespace
