#include <algorithm>
#include <set>
#include <sstream>

#include "racefixer/race_detector.h"

namespace racefixer::detect {
namespace {

std::string thread_name(ThreadId id) { return "T" + std::to_string(id); }

Diagnostic fault(const std::string& code, const std::string& message) {
  return Diagnostic{Severity::kError, code, message};
}

std::string at(SourceCoord where) {
  std::ostringstream os;
  os << where;
  return os.str();
}

}  // namespace

Machine::Machine(std::shared_ptr<const Program> program, Limits limits)
    : program_(std::move(program)), limits_(limits) {
  globals_ = program_->global_initial;
  owners_.assign(program_->mutexes.size(), -1);
  ThreadState main;
  main.function = program_->main_function;
  main.locals.assign(program_->functions[main.function].local_count, 0);
  threads_.push_back(std::move(main));
  start_aborted_ = !advance(threads_.front(), start_diagnostics_);
}

// Runs local instructions until the thread reaches a visible operation or
// returns. Returns false on a fault.
bool Machine::advance(ThreadState& thread, std::vector<Diagnostic>& out) {
  const Function& fn = program_->functions[thread.function];
  auto pop = [&] {
    const auto v = thread.stack.back();
    thread.stack.pop_back();
    return v;
  };
  while (!thread.finished) {
    const Instr& ins = fn.code.at(thread.pc);
    if (is_visible(ins.op)) return true;
    if (++thread.steps > limits_.step_budget) {
      out.push_back(fault("StepBudgetExceeded", thread_name(thread.id) + " in " + fn.name +
                                            " exceeded " + std::to_string(limits_.step_budget) +
                                            " steps; schedule abandoned"));
      return false;
    }
    ++thread.pc;
    switch (ins.op) {
      case Op::kPush: thread.stack.push_back(ins.arg); break;
      case Op::kLoadLocal: thread.stack.push_back(thread.locals[ins.arg]); break;
      case Op::kStoreLocal: thread.locals[ins.arg] = pop(); break;
      case Op::kDup: thread.stack.push_back(thread.stack.back()); break;
      case Op::kPop: pop(); break;
      case Op::kNeg: thread.stack.back() = -thread.stack.back(); break;
      case Op::kNot: thread.stack.back() = !thread.stack.back(); break;
      case Op::kToBool: thread.stack.back() = thread.stack.back() != 0; break;
      case Op::kJump: thread.pc = static_cast<std::uint32_t>(ins.arg); break;
      case Op::kJumpIfZero:
        if (pop() == 0) thread.pc = static_cast<std::uint32_t>(ins.arg);
        break;
      case Op::kReturn:
        thread.stack.clear();
        thread.finished = true;
        if (!thread.held.empty()) {
          out.push_back(Diagnostic{Severity::kWarning, "LeakedLock",
                                   thread_name(thread.id) + " returned from " + fn.name +
                                       " holding " + program_->mutexes[thread.held.front()]});
        }
        break;
      default: {
        const auto b = pop();
        auto& a = thread.stack.back();
        if ((ins.op == Op::kDiv || ins.op == Op::kMod) && b == 0) {
          out.push_back(fault("DivisionByZero", "division by zero at " + at(ins.where)));
          return false;
        }
        switch (ins.op) {
          case Op::kAdd: a = static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b)); break;
          case Op::kSub: a = static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b)); break;
          case Op::kMul: a = static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b)); break;
          case Op::kDiv: a = (b == -1) ? static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(a)) : a / b; break;
          case Op::kMod: a = (b == -1) ? 0 : a % b; break;
          case Op::kLt: a = a < b; break;
          case Op::kLe: a = a <= b; break;
          case Op::kGt: a = a > b; break;
          case Op::kGe: a = a >= b; break;
          case Op::kEq: a = a == b; break;
          case Op::kNe: a = a != b; break;
          default: break;
        }
      }
    }
  }
  return true;
}

bool Machine::is_enabled(const ThreadState& thread) const {
  if (thread.finished) return false;
  const Instr& ins = program_->functions[thread.function].code[thread.pc];
  switch (ins.op) {
    case Op::kLock:
      return owners_[ins.arg] == -1;
    case Op::kJoin: {
      const auto target = thread.stack.back();
      // Invalid targets are enabled so that step() reports them.
      if (target <= 0 || target >= static_cast<std::int64_t>(threads_.size()) ||
          target == thread.id) {
        return true;
      }
      return threads_[target].finished;
    }
    default:
      return true;
  }
}

std::vector<ThreadId> Machine::enabled() const {
  std::vector<ThreadId> out;
  if (start_aborted_) return out;
  for (const auto& t : threads_) {
    if (is_enabled(t)) out.push_back(t.id);
  }
  return out;
}

bool Machine::all_finished() const {
  return std::all_of(threads_.begin(), threads_.end(), [](const auto& t) { return t.finished; });
}

StepOutcome Machine::step(ThreadId id) {
  StepOutcome outcome;
  ThreadState& thread = threads_.at(id);
  if (!is_enabled(thread)) throw Error(ErrorCode::kInvalidArgument, thread_name(id) + " is not enabled");
  const Function& fn = program_->functions[thread.function];
  const Instr& ins = fn.code[thread.pc];
  outcome.event.thread = id;
  outcome.event.where = ins.where;
  outcome.event.target = static_cast<int>(ins.arg);

  if (++thread.steps > limits_.step_budget) {
    outcome.diagnostics.push_back(fault("StepBudgetExceeded", thread_name(id) + " in " + fn.name +
                                                          " exceeded " +
                                                          std::to_string(limits_.step_budget) +
                                                          " steps; schedule abandoned"));
    outcome.aborted = true;
    outcome.performed = false;
    return outcome;
  }

  ThreadId spawned = -1;
  switch (ins.op) {
    case Op::kLoadGlobal:
      outcome.event.kind = EventKind::kRead;
      thread.stack.push_back(globals_[ins.arg]);
      break;
    case Op::kStoreGlobal:
      outcome.event.kind = EventKind::kWrite;
      globals_[ins.arg] = thread.stack.back();
      thread.stack.pop_back();
      break;
    case Op::kLock:
      outcome.event.kind = EventKind::kLock;
      owners_[ins.arg] = id;
      thread.held.push_back(static_cast<int>(ins.arg));
      break;
    case Op::kUnlock: {
      outcome.event.kind = EventKind::kUnlock;
      if (owners_[ins.arg] != id) {
        outcome.diagnostics.push_back(fault(
            "UnlockNotHeld", thread_name(id) + " unlocks " + program_->mutexes[ins.arg] +
                                 " without holding it at " + at(ins.where)));
        outcome.aborted = true;
        outcome.performed = false;
        return outcome;
      }
      owners_[ins.arg] = -1;
      thread.held.erase(std::find(thread.held.begin(), thread.held.end(), ins.arg));
      break;
    }
    case Op::kCreate: {
      outcome.event.kind = EventKind::kCreate;
      if (static_cast<int>(threads_.size()) - 1 >= limits_.max_spawned_threads) {
        outcome.diagnostics.push_back(fault(
            "ThreadLimit", "more than " + std::to_string(limits_.max_spawned_threads) +
                               " threads spawned at " + at(ins.where)));
        outcome.aborted = true;
        outcome.performed = false;
        return outcome;
      }
      const auto argument = thread.stack.back();
      thread.stack.pop_back();
      ThreadState child;
      child.id = static_cast<ThreadId>(threads_.size());
      child.function = static_cast<int>(ins.arg);
      child.locals.assign(std::max(1, program_->functions[child.function].local_count), 0);
      child.locals[0] = argument;
      spawned = child.id;
      outcome.event.target = child.id;
      thread.stack.push_back(child.id);
      threads_.push_back(std::move(child));
      break;
    }
    case Op::kJoin: {
      outcome.event.kind = EventKind::kJoin;
      const auto target = thread.stack.back();
      thread.stack.pop_back();
      if (target <= 0 || target >= static_cast<std::int64_t>(threads_.size()) || target == id) {
        outcome.diagnostics.push_back(
            fault("InvalidJoin", thread_name(id) + " joins an invalid thread handle at " +
                                     at(ins.where)));
        outcome.aborted = true;
        outcome.performed = false;
        return outcome;
      }
      outcome.event.target = static_cast<int>(target);
      break;
    }
    default:
      break;
  }

  // threads_ may have grown; re-fetch.
  ThreadState& self = threads_[id];
  ++self.pc;
  if (!advance(self, outcome.diagnostics)) outcome.aborted = true;
  if (spawned >= 0 && !outcome.aborted) {
    if (!advance(threads_[spawned], outcome.diagnostics)) outcome.aborted = true;
  }
  return outcome;
}

std::vector<std::string> Machine::describe_blocked() const {
  std::vector<std::string> out;
  for (const auto& t : threads_) {
    if (t.finished) continue;
    const Instr& ins = program_->functions[t.function].code[t.pc];
    std::string line = thread_name(t.id) + " (" + program_->functions[t.function].name + ")";
    if (ins.op == Op::kLock && owners_[ins.arg] != -1) {
      line += " waits for " + program_->mutexes[ins.arg] + " held by " +
              thread_name(owners_[ins.arg]) + " at " + at(ins.where);
    } else if (ins.op == Op::kJoin && !t.stack.empty()) {
      line += " waits for " + thread_name(static_cast<ThreadId>(t.stack.back())) +
              " to finish at " + at(ins.where);
    } else {
      line += " is runnable";
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::string> Machine::blocked_mutexes() const {
  std::set<std::string> names;
  for (const auto& t : threads_) {
    if (t.finished) continue;
    const Instr& ins = program_->functions[t.function].code[t.pc];
    if (ins.op == Op::kLock) names.insert(program_->mutexes[ins.arg]);
    for (const int m : t.held) names.insert(program_->mutexes[m]);
  }
  return {names.begin(), names.end()};
}

Machine replay(std::shared_ptr<const Program> program, std::span<const ThreadId> schedule,
               Limits limits) {
  Machine machine(std::move(program), limits);
  for (const ThreadId t : schedule) {
    const auto enabled = machine.enabled();
    if (std::find(enabled.begin(), enabled.end(), t) == enabled.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "schedule step " + thread_name(t) + " is not enabled");
    }
    if (machine.step(t).aborted) break;
  }
  return machine;
}

}  // namespace racefixer::detect
