#include <array>
#include <cctype>

#include "racefixer/source_model.h"

namespace racefixer::source {
namespace {

enum class TokKind { kIdent, kNumber, kPunct, kEof };

struct Tok {
  TokKind kind;
  std::string text;
  std::string trivia;
  std::size_t start = 0;
  std::size_t end = 0;
};

constexpr std::array<std::string_view, 8> kTwoCharPuncts = {
    "==", "!=", "<=", ">=", "&&", "||", "+=", "-="};
constexpr std::string_view kOneCharPuncts = "(){};,=+-*/%<>!&";

constexpr std::array<std::string_view, 10> kReserved = {
    "int", "void", "if", "else", "while", "return", "break", "continue",
    "pthread_t", "pthread_mutex_t"};

bool is_reserved(std::string_view s) {
  for (auto r : kReserved) {
    if (r == s) return true;
  }
  return false;
}

class Lexer {
 public:
  Lexer(std::string_view text, const LineMap& lines) : text_(text), lines_(lines) {}

  std::vector<Tok> run() {
    std::vector<Tok> out;
    while (true) {
      const std::size_t trivia_start = pos_;
      skip_trivia();
      Tok tok;
      tok.trivia = std::string(text_.substr(trivia_start, pos_ - trivia_start));
      tok.start = pos_;
      if (pos_ >= text_.size()) {
        tok.kind = TokKind::kEof;
        tok.end = pos_;
        out.push_back(std::move(tok));
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          ++pos_;
        }
        tok.kind = TokKind::kIdent;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          fail(tok.start, pos_ + 1, "malformed integer literal");
        }
        tok.kind = TokKind::kNumber;
      } else {
        tok.kind = TokKind::kPunct;
        const auto two = text_.substr(pos_, 2);
        bool matched = false;
        for (auto p : kTwoCharPuncts) {
          if (two == p) {
            pos_ += 2;
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (kOneCharPuncts.find(c) == std::string_view::npos) {
            fail(pos_, pos_ + 1, std::string("unexpected character '") + c + "'");
          }
          ++pos_;
        }
      }
      tok.end = pos_;
      tok.text = std::string(text_.substr(tok.start, tok.end - tok.start));
      out.push_back(std::move(tok));
    }
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (text_.substr(pos_, 2) == "/*") {
        const auto close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          fail(pos_, pos_ + 2, "unterminated block comment");
        }
        pos_ = close + 2;
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(std::size_t start, std::size_t end, const std::string& msg) {
    end = std::min(end, text_.size());
    throw SyntaxError(Span{start, end, lines_.coord(start), lines_.coord(end)}, msg);
  }

  std::string_view text_;
  const LineMap& lines_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::vector<Tok> toks, const LineMap& lines)
      : text_(text), toks_(std::move(toks)), lines_(lines) {}

  CstNode translation_unit() {
    CstNode tu{NodeKind::kTranslationUnit};
    while (peek().kind != TokKind::kEof) tu.children.push_back(top_level());
    tu.children.push_back(leaf(NodeKind::kToken));
    tu.span = Span{0, text_.size(), lines_.coord(0), lines_.coord(text_.size())};
    return tu;
  }

 private:
  const Tok& peek(std::size_t ahead = 0) const {
    return toks_[std::min(index_ + ahead, toks_.size() - 1)];
  }
  bool at(std::string_view text) const {
    return peek().kind != TokKind::kEof && peek().text == text;
  }
  bool at_ident() const {
    return peek().kind == TokKind::kIdent && !is_reserved(peek().text);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Tok& t = peek();
    const std::size_t end = t.kind == TokKind::kEof ? t.start : t.end;
    const std::string found = t.kind == TokKind::kEof ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(Span{t.start, end, lines_.coord(t.start), lines_.coord(end)},
                      msg + ", found " + found);
  }

  CstNode leaf(NodeKind kind) {
    const Tok& t = toks_[index_];
    CstNode node{kind};
    node.text = t.text;
    node.leading_trivia = t.trivia;
    node.span = Span{t.start, t.end, lines_.coord(t.start), lines_.coord(t.end)};
    if (t.kind != TokKind::kEof) ++index_;
    return node;
  }

  CstNode expect(std::string_view text, const char* what) {
    if (!at(text)) fail(std::string("expected ") + what);
    return leaf(NodeKind::kToken);
  }

  CstNode expect_name(const char* what) {
    if (!at_ident()) fail(std::string("expected ") + what);
    return leaf(NodeKind::kIdentifier);
  }

  static CstNode& finish(CstNode& node) {
    node.span.start_byte = node.children.front().span.start_byte;
    node.span.start = node.children.front().span.start;
    node.span.end_byte = node.children.back().span.end_byte;
    node.span.end = node.children.back().span.end;
    return node;
  }

  static CstNode make(NodeKind kind, std::vector<CstNode> children) {
    CstNode node{kind};
    node.children = std::move(children);
    finish(node);
    return node;
  }

  CstNode top_level() {
    if (at("pthread_mutex_t")) {
      CstNode node{NodeKind::kMutexDecl};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect_name("mutex name"));
      node.children.push_back(expect("=", "'=' in mutex declaration"));
      node.children.push_back(expect("PTHREAD_MUTEX_INITIALIZER", "PTHREAD_MUTEX_INITIALIZER"));
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    if (at("pthread_t")) {
      CstNode node{NodeKind::kVarDecl};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect_name("declarator name"));
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    if (at("void")) return thread_function();
    if (at("int")) {
      if (peek(1).kind == TokKind::kIdent && peek(2).text == "(") return int_function();
      CstNode node{NodeKind::kVarDecl};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect_name("declarator name"));
      if (at("=")) {
        node.children.push_back(leaf(NodeKind::kToken));
        node.children.push_back(expression());
      }
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    fail("expected a declaration or function definition");
  }

  // void *NAME(void *ARG) { ... }
  CstNode thread_function() {
    CstNode node{NodeKind::kFuncDef};
    node.children.push_back(leaf(NodeKind::kToken));
    node.children.push_back(expect("*", "'*' in thread function return type"));
    node.children.push_back(expect_name("function name"));
    node.children.push_back(expect("(", "'('"));
    node.children.push_back(expect("void", "'void *' parameter"));
    node.children.push_back(expect("*", "'*' in parameter type"));
    node.children.push_back(expect_name("parameter name"));
    node.children.push_back(expect(")", "')'"));
    node.children.push_back(compound());
    finish(node);
    return node;
  }

  // int NAME() { ... } or int NAME(void) { ... }
  CstNode int_function() {
    CstNode node{NodeKind::kFuncDef};
    node.children.push_back(leaf(NodeKind::kToken));
    node.children.push_back(expect_name("function name"));
    node.children.push_back(expect("(", "'('"));
    if (at("void")) node.children.push_back(leaf(NodeKind::kToken));
    node.children.push_back(expect(")", "')'"));
    node.children.push_back(compound());
    finish(node);
    return node;
  }

  CstNode compound() {
    CstNode node{NodeKind::kCompoundStmt};
    node.children.push_back(expect("{", "'{'"));
    while (!at("}")) {
      if (peek().kind == TokKind::kEof) fail("expected '}'");
      node.children.push_back(statement());
    }
    node.children.push_back(leaf(NodeKind::kToken));
    finish(node);
    return node;
  }

  CstNode statement() {
    if (at("{")) return compound();
    if (at("if")) {
      CstNode node{NodeKind::kIfStmt};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect("(", "'(' after 'if'"));
      node.children.push_back(expression());
      node.children.push_back(expect(")", "')'"));
      node.children.push_back(statement());
      if (at("else")) {
        node.children.push_back(leaf(NodeKind::kToken));
        node.children.push_back(statement());
      }
      finish(node);
      return node;
    }
    if (at("while")) {
      CstNode node{NodeKind::kWhileStmt};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect("(", "'(' after 'while'"));
      node.children.push_back(expression());
      node.children.push_back(expect(")", "')'"));
      node.children.push_back(statement());
      finish(node);
      return node;
    }
    if (at("return")) {
      CstNode node{NodeKind::kReturnStmt};
      node.children.push_back(leaf(NodeKind::kToken));
      if (!at(";")) node.children.push_back(expression());
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    if (at("break") || at("continue")) {
      CstNode node{at("break") ? NodeKind::kBreakStmt : NodeKind::kContinueStmt};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    if (at("int") || at("pthread_t")) {
      const bool is_int = at("int");
      CstNode node{NodeKind::kDeclStmt};
      node.children.push_back(leaf(NodeKind::kToken));
      node.children.push_back(expect_name("declarator name"));
      if (is_int && at("=")) {
        node.children.push_back(leaf(NodeKind::kToken));
        node.children.push_back(expression());
      }
      node.children.push_back(expect(";", "';'"));
      finish(node);
      return node;
    }
    CstNode node{NodeKind::kExprStmt};
    node.children.push_back(expression());
    node.children.push_back(expect(";", "';'"));
    finish(node);
    return node;
  }

  CstNode expression() {
    if (at_ident() && (peek(1).text == "=" || peek(1).text == "+=" || peek(1).text == "-=") &&
        peek(1).kind == TokKind::kPunct) {
      std::vector<CstNode> parts;
      parts.push_back(leaf(NodeKind::kIdentifier));
      parts.push_back(leaf(NodeKind::kToken));
      parts.push_back(expression());
      return make(NodeKind::kAssignExpr, std::move(parts));
    }
    return binary(0);
  }

  static int precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
  }

  CstNode binary(int min_prec) {
    CstNode lhs = unary();
    while (true) {
      const int prec = peek().kind == TokKind::kPunct ? precedence(peek().text) : 0;
      if (prec == 0 || prec <= min_prec) return lhs;
      std::vector<CstNode> parts;
      parts.push_back(std::move(lhs));
      parts.push_back(leaf(NodeKind::kToken));
      parts.push_back(binary(prec));
      lhs = make(NodeKind::kBinaryExpr, std::move(parts));
    }
  }

  CstNode unary() {
    if (at("-") || at("!")) {
      std::vector<CstNode> parts;
      parts.push_back(leaf(NodeKind::kToken));
      parts.push_back(unary());
      return make(NodeKind::kUnaryExpr, std::move(parts));
    }
    if (at("&")) {
      std::vector<CstNode> parts;
      parts.push_back(leaf(NodeKind::kToken));
      parts.push_back(expect_name("identifier after '&'"));
      return make(NodeKind::kAddrOf, std::move(parts));
    }
    return primary();
  }

  CstNode primary() {
    if (peek().kind == TokKind::kNumber) return leaf(NodeKind::kIntLiteral);
    if (at("(")) {
      std::vector<CstNode> parts;
      parts.push_back(leaf(NodeKind::kToken));
      parts.push_back(expression());
      parts.push_back(expect(")", "')'"));
      return make(NodeKind::kParenExpr, std::move(parts));
    }
    if (!at_ident()) fail("expected an expression");
    if (peek(1).text == "(" && peek(1).kind == TokKind::kPunct) {
      std::vector<CstNode> parts;
      parts.push_back(leaf(NodeKind::kIdentifier));
      parts.push_back(leaf(NodeKind::kToken));
      if (!at(")")) {
        parts.push_back(expression());
        while (at(",")) {
          parts.push_back(leaf(NodeKind::kToken));
          parts.push_back(expression());
        }
      }
      parts.push_back(expect(")", "')' to close the call"));
      return make(NodeKind::kCallExpr, std::move(parts));
    }
    return leaf(NodeKind::kIdentifier);
  }

  std::string_view text_;
  std::vector<Tok> toks_;
  const LineMap& lines_;
  std::size_t index_ = 0;
};

}  // namespace

SyntaxError::SyntaxError(Span span, const std::string& message)
    : Error(ErrorCode::kSyntax, std::to_string(span.start.line) + ":" +
                                    std::to_string(span.start.column) + ": " + message),
      span_(span) {}

CstNode parse_source(std::string_view text) {
  const LineMap lines(text);
  Lexer lexer(text, lines);
  Parser parser(text, lexer.run(), lines);
  return parser.translation_unit();
}

}  // namespace racefixer::source
