#include <charconv>
#include <map>
#include <sstream>

#include "racefixer/race_detector.h"

namespace racefixer::detect {
namespace {

using source::CstNode;
using source::NodeKind;

[[noreturn]] void unsupported(const CstNode& at, const std::string& what) {
  std::ostringstream msg;
  msg << at.span.start << ": " << what;
  throw Error(ErrorCode::kUnsupportedConstruct, msg.str());
}

std::int64_t literal_value(const CstNode& node) {
  std::int64_t value = 0;
  const auto& t = node.text;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) unsupported(node, "integer literal out of range");
  return value;
}

// Strips parentheses.
const CstNode& unwrap(const CstNode& node) {
  return node.kind == NodeKind::kParenExpr ? unwrap(node.children.at(1)) : node;
}

class Compiler {
 public:
  explicit Compiler(Program& program) : program_(program) {}

  void unit(const CstNode& tu) {
    // Declarations first so functions may reference later globals.
    for (const auto& item : tu.children) {
      if (item.kind == NodeKind::kVarDecl) {
        const CstNode* name = source::declared_name(item);
        declare_unique(*name);
        globals_[name->text] = static_cast<int>(program_.globals.size());
        program_.globals.push_back(name->text);
        const auto parts = item.structural_children();
        program_.global_initial.push_back(parts.size() > 1 ? constant(*parts[1]) : 0);
      } else if (item.kind == NodeKind::kMutexDecl) {
        const CstNode* name = source::declared_name(item);
        declare_unique(*name);
        mutexes_[name->text] = static_cast<int>(program_.mutexes.size());
        program_.mutexes.push_back(name->text);
      } else if (item.kind == NodeKind::kFuncDef) {
        const CstNode* name = source::declared_name(item);
        declare_unique(*name);
        functions_[name->text] = static_cast<int>(program_.functions.size());
        Function fn;
        fn.name = name->text;
        fn.has_parameter = source::function_parameter(item) != nullptr;
        if (name->text == "main") {
          if (fn.has_parameter) unsupported(item, "main must not take a thread parameter");
          program_.main_function = static_cast<int>(program_.functions.size());
        } else if (!fn.has_parameter) {
          unsupported(item, "only main and thread start functions are supported");
        }
        program_.functions.push_back(std::move(fn));
      }
    }
    if (program_.main_function < 0) unsupported(tu, "no main function");

    for (const auto& item : tu.children) {
      if (item.kind != NodeKind::kFuncDef) continue;
      current_ = &program_.functions[functions_.at(source::declared_name(item)->text)];
      scopes_.assign(1, {});
      next_local_ = 0;
      if (const CstNode* param = source::function_parameter(item)) {
        scopes_.back()[param->text] = next_local_++;
        max_local_ = next_local_;
      }
      statement(*source::function_body(item));
      emit(Op::kPush, 0, source::close_brace(*source::function_body(item)).span.start);
      emit(Op::kReturn, 0, {});
      current_->local_count = max_local_;
      max_local_ = 0;
    }
  }

 private:
  void declare_unique(const CstNode& name) {
    if (globals_.contains(name.text) || mutexes_.contains(name.text) ||
        functions_.contains(name.text)) {
      unsupported(name, "redeclaration of '" + name.text + "'");
    }
  }

  std::int64_t constant(const CstNode& expr) {
    const CstNode& e = unwrap(expr);
    switch (e.kind) {
      case NodeKind::kIntLiteral:
        return literal_value(e);
      case NodeKind::kUnaryExpr: {
        const auto v = constant(e.children.at(1));
        return e.children.front().text == "-" ? -v : !v;
      }
      case NodeKind::kBinaryExpr: {
        const auto a = constant(e.children.at(0));
        const auto b = constant(e.children.at(2));
        const auto& op = e.children.at(1).text;
        if ((op == "/" || op == "%") && b == 0) unsupported(e, "division by zero in initializer");
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "/") return a / b;
        if (op == "%") return a % b;
        if (op == "<") return a < b;
        if (op == "<=") return a <= b;
        if (op == ">") return a > b;
        if (op == ">=") return a >= b;
        if (op == "==") return a == b;
        if (op == "!=") return a != b;
        if (op == "&&") return a && b;
        if (op == "||") return a || b;
        break;
      }
      default:
        break;
    }
    unsupported(e, "global initializer must be a constant expression");
  }

  std::size_t emit(Op op, std::int64_t arg, SourceCoord where) {
    current_->code.push_back(Instr{op, arg, where});
    return current_->code.size() - 1;
  }
  std::size_t here() const { return current_->code.size(); }
  void patch_target(std::size_t at, std::size_t target) {
    current_->code[at].arg = static_cast<std::int64_t>(target);
  }

  const int* find_local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto hit = it->find(name); hit != it->end()) return &hit->second;
    }
    return nullptr;
  }

  void load(const CstNode& id) {
    if (const int* slot = find_local(id.text)) {
      emit(Op::kLoadLocal, *slot, id.span.start);
    } else if (auto g = globals_.find(id.text); g != globals_.end()) {
      emit(Op::kLoadGlobal, g->second, id.span.start);
    } else {
      unsupported(id, "'" + id.text + "' is not a variable");
    }
  }

  void store(const CstNode& id) {
    if (const int* slot = find_local(id.text)) {
      emit(Op::kStoreLocal, *slot, id.span.start);
    } else if (auto g = globals_.find(id.text); g != globals_.end()) {
      emit(Op::kStoreGlobal, g->second, id.span.start);
    } else {
      unsupported(id, "'" + id.text + "' is not a variable");
    }
  }

  int mutex_operand(const CstNode& arg) {
    const CstNode& e = unwrap(arg);
    if (e.kind != NodeKind::kAddrOf) unsupported(e, "expected &mutex");
    const CstNode& name = e.children.back();
    auto it = mutexes_.find(name.text);
    if (it == mutexes_.end()) unsupported(name, "'" + name.text + "' is not a global mutex");
    return it->second;
  }

  void require_null(const CstNode& arg) {
    const CstNode& e = unwrap(arg);
    if (e.kind != NodeKind::kIntLiteral || literal_value(e) != 0) {
      unsupported(e, "expected 0 here");
    }
  }

  void call(const CstNode& node) {
    const CstNode& callee = node.children.front();
    std::vector<const CstNode*> args = node.structural_children();
    args.erase(args.begin());
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        unsupported(node, callee.text + " expects " + std::to_string(n) + " arguments");
      }
    };
    if (callee.text == "pthread_create") {
      arity(4);
      const CstNode& handle = unwrap(*args[0]);
      if (handle.kind != NodeKind::kAddrOf) unsupported(handle, "expected &thread");
      require_null(*args[1]);
      const CstNode& fn = unwrap(*args[2]);
      auto it = fn.kind == NodeKind::kIdentifier ? functions_.find(fn.text) : functions_.end();
      if (it == functions_.end() || !program_.functions[it->second].has_parameter) {
        unsupported(fn, "expected a thread start function");
      }
      expression(*args[3]);
      emit(Op::kCreate, it->second, callee.span.start);
      store(handle.children.back());
      emit(Op::kPush, 0, {});
    } else if (callee.text == "pthread_join") {
      arity(2);
      expression(*args[0]);
      require_null(*args[1]);
      emit(Op::kJoin, 0, callee.span.start);
      emit(Op::kPush, 0, {});
    } else if (callee.text == "pthread_mutex_lock" || callee.text == "pthread_mutex_unlock") {
      arity(1);
      const int m = mutex_operand(*args[0]);
      emit(callee.text == "pthread_mutex_lock" ? Op::kLock : Op::kUnlock, m, callee.span.start);
      emit(Op::kPush, 0, {});
    } else {
      unsupported(callee, "call to unsupported function '" + callee.text + "'");
    }
  }

  void expression(const CstNode& node) {
    switch (node.kind) {
      case NodeKind::kIntLiteral:
        emit(Op::kPush, literal_value(node), node.span.start);
        return;
      case NodeKind::kIdentifier:
        load(node);
        return;
      case NodeKind::kParenExpr:
        expression(node.children.at(1));
        return;
      case NodeKind::kUnaryExpr:
        expression(node.children.at(1));
        emit(node.children.front().text == "-" ? Op::kNeg : Op::kNot, 0, node.span.start);
        return;
      case NodeKind::kAssignExpr: {
        const CstNode& target = node.children.at(0);
        const std::string& op = node.children.at(1).text;
        if (op != "=") load(target);
        expression(node.children.at(2));
        if (op == "+=") emit(Op::kAdd, 0, node.span.start);
        if (op == "-=") emit(Op::kSub, 0, node.span.start);
        emit(Op::kDup, 0, {});
        store(target);
        return;
      }
      case NodeKind::kBinaryExpr:
        binary(node);
        return;
      case NodeKind::kCallExpr:
        call(node);
        return;
      case NodeKind::kAddrOf:
        unsupported(node, "address-of is only supported in pthread calls");
      default:
        unsupported(node, std::string("unexpected ") + source::to_string(node.kind));
    }
  }

  void binary(const CstNode& node) {
    const std::string& op = node.children.at(1).text;
    if (op == "&&" || op == "||") {
      expression(node.children.at(0));
      if (op == "||") emit(Op::kNot, 0, {});
      const auto short_jump = emit(Op::kJumpIfZero, 0, {});
      expression(node.children.at(2));
      emit(Op::kToBool, 0, {});
      const auto end_jump = emit(Op::kJump, 0, {});
      patch_target(short_jump, here());
      emit(Op::kPush, op == "||" ? 1 : 0, {});
      patch_target(end_jump, here());
      return;
    }
    expression(node.children.at(0));
    expression(node.children.at(2));
    static const std::map<std::string, Op, std::less<>> kOps = {
        {"+", Op::kAdd}, {"-", Op::kSub}, {"*", Op::kMul}, {"/", Op::kDiv}, {"%", Op::kMod},
        {"<", Op::kLt},  {"<=", Op::kLe}, {">", Op::kGt},  {">=", Op::kGe}, {"==", Op::kEq},
        {"!=", Op::kNe}};
    emit(kOps.at(op), 0, node.children.at(1).span.start);
  }

  void statement(const CstNode& node) {
    switch (node.kind) {
      case NodeKind::kCompoundStmt:
        scopes_.emplace_back();
        for (const CstNode* child : node.structural_children()) statement(*child);
        scopes_.pop_back();
        return;
      case NodeKind::kExprStmt:
        expression(node.children.front());
        emit(Op::kPop, 0, {});
        return;
      case NodeKind::kDeclStmt: {
        const CstNode* name = source::declared_name(node);
        const auto parts = node.structural_children();
        if (parts.size() > 1) {
          expression(*parts[1]);
        } else {
          emit(Op::kPush, 0, {});
        }
        const int slot = next_local_++;
        max_local_ = std::max(max_local_, next_local_);
        scopes_.back()[name->text] = slot;
        emit(Op::kStoreLocal, slot, name->span.start);
        return;
      }
      case NodeKind::kIfStmt: {
        const auto parts = source::if_parts(node);
        expression(*parts.condition);
        const auto skip_then = emit(Op::kJumpIfZero, 0, {});
        statement(*parts.then_branch);
        if (parts.else_branch) {
          const auto skip_else = emit(Op::kJump, 0, {});
          patch_target(skip_then, here());
          statement(*parts.else_branch);
          patch_target(skip_else, here());
        } else {
          patch_target(skip_then, here());
        }
        return;
      }
      case NodeKind::kWhileStmt: {
        const auto parts = source::while_parts(node);
        const auto top = here();
        expression(*parts.condition);
        const auto exit_jump = emit(Op::kJumpIfZero, 0, {});
        loops_.push_back({top, {}});
        statement(*parts.body);
        emit(Op::kJump, static_cast<std::int64_t>(top), {});
        patch_target(exit_jump, here());
        for (const auto at : loops_.back().breaks) patch_target(at, here());
        loops_.pop_back();
        return;
      }
      case NodeKind::kBreakStmt:
        if (loops_.empty()) unsupported(node, "'break' outside a loop");
        loops_.back().breaks.push_back(emit(Op::kJump, 0, {}));
        return;
      case NodeKind::kContinueStmt:
        if (loops_.empty()) unsupported(node, "'continue' outside a loop");
        emit(Op::kJump, static_cast<std::int64_t>(loops_.back().top), {});
        return;
      case NodeKind::kReturnStmt: {
        const auto parts = node.structural_children();
        if (parts.empty()) {
          emit(Op::kPush, 0, {});
        } else {
          expression(*parts[0]);
        }
        emit(Op::kReturn, 0, node.span.start);
        return;
      }
      default:
        unsupported(node, std::string("unexpected ") + source::to_string(node.kind));
    }
  }

  struct Loop {
    std::size_t top;
    std::vector<std::size_t> breaks;
  };

  Program& program_;
  Function* current_ = nullptr;
  std::map<std::string, int, std::less<>> globals_;
  std::map<std::string, int, std::less<>> mutexes_;
  std::map<std::string, int, std::less<>> functions_;
  std::vector<std::map<std::string, int, std::less<>>> scopes_;
  std::vector<Loop> loops_;
  int next_local_ = 0;
  int max_local_ = 0;
};

}  // namespace

bool is_visible(Op op) {
  switch (op) {
    case Op::kLoadGlobal:
    case Op::kStoreGlobal:
    case Op::kLock:
    case Op::kUnlock:
    case Op::kCreate:
    case Op::kJoin:
      return true;
    default:
      return false;
  }
}

std::shared_ptr<const Program> Program::compile(const source::CstNode& unit) {
  auto program = std::make_shared<Program>();
  Compiler(*program).unit(unit);
  return program;
}

}  // namespace racefixer::detect
