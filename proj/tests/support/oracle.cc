#include "oracle.h"

#include <stdexcept>
#include <vector>

namespace rftest {
namespace {

using namespace racefixer;
using namespace racefixer::detect;

struct Search {
  std::shared_ptr<const Program> program;
  std::uint64_t cap;
  OracleResult result;
  std::vector<Event> trace;

  void leaf(const Machine& m) {
    ++result.interleavings;
    if (result.interleavings > cap) throw std::runtime_error("oracle cap exceeded");
    if (!m.all_finished()) ++result.deadlocked;
    const std::size_t n = trace.size();
    // reach[j][i]: event i happens before event j.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    auto inherit = [&](std::size_t j, std::size_t p) {
      reach[j][p] = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (reach[p][i]) reach[j][i] = true;
      }
    };
    for (std::size_t j = 0; j < n; ++j) {
      const Event& e = trace[j];
      bool has_own_predecessor = false;
      for (std::size_t p = j; p-- > 0;) {
        if (trace[p].thread == e.thread) {
          inherit(j, p);
          has_own_predecessor = true;
          break;
        }
      }
      if (!has_own_predecessor) {
        for (std::size_t p = 0; p < j; ++p) {
          if (trace[p].kind == EventKind::kCreate && trace[p].target == e.thread) inherit(j, p);
        }
      }
      if (e.kind == EventKind::kLock) {
        for (std::size_t p = 0; p < j; ++p) {
          if (trace[p].kind == EventKind::kUnlock && trace[p].target == e.target) inherit(j, p);
        }
      }
      if (e.kind == EventKind::kJoin) {
        for (std::size_t p = 0; p < j; ++p) {
          if (trace[p].thread == e.target) inherit(j, p);
        }
      }
    }
    auto is_access = [](const Event& e) {
      return e.kind == EventKind::kRead || e.kind == EventKind::kWrite;
    };
    for (std::size_t j = 0; j < n; ++j) {
      if (!is_access(trace[j])) continue;
      for (std::size_t i = 0; i < j; ++i) {
        const Event& a = trace[i];
        const Event& b = trace[j];
        if (!is_access(a) || a.target != b.target || a.thread == b.thread) continue;
        if (a.kind == EventKind::kRead && b.kind == EventKind::kRead) continue;
        if (reach[j][i]) continue;
        result.races.insert({program->globals[a.target], std::min(a.where, b.where),
                             std::max(a.where, b.where)});
      }
    }
  }

  void dfs(const Machine& m) {
    const auto enabled = m.enabled();
    if (enabled.empty()) {
      leaf(m);
      return;
    }
    for (const ThreadId t : enabled) {
      Machine next = m;
      const StepOutcome out = next.step(t);
      if (out.performed) trace.push_back(out.event);
      if (out.aborted) {
        leaf(next);
      } else {
        dfs(next);
      }
      if (out.performed) trace.pop_back();
    }
  }
};

}  // namespace

OracleResult brute_force(std::shared_ptr<const Program> program, std::uint64_t cap) {
  Search s{program, cap, {}, {}};
  Machine m(program);
  if (m.start_aborted()) return s.result;
  s.dfs(m);
  return s.result;
}

std::set<OracleRace> as_oracle(const Verdict& verdict) {
  std::set<OracleRace> out;
  for (const auto& r : verdict.races) {
    const auto key = r.key();
    out.insert({r.variable, key.first, key.second});
  }
  return out;
}

}  // namespace rftest
