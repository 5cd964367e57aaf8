#include <algorithm>
#include <set>
#include <tuple>

#include "racefixer/transform_engine.h"

namespace racefixer::transform {
namespace {

struct Slot {
  std::size_t patch;
  std::size_t edit;
};

bool only_trivia(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
    } else if (text.substr(pos, 2) == "//") {
      const auto nl = text.find('\n', pos);
      pos = nl == std::string_view::npos ? text.size() : nl;
    } else if (text.substr(pos, 2) == "/*") {
      const auto close = text.find("*/", pos + 2);
      if (close == std::string_view::npos) return false;
      pos = close + 2;
    } else {
      return false;
    }
  }
  return true;
}

// Two guard insertions may share an offset; anything else touching the
// same bytes (closed intervals) conflicts.
bool conflicts(const GuardedEdit& a, const GuardedEdit& b) {
  const auto& sa = a.edit.span;
  const auto& sb = b.edit.span;
  const bool both_guards = sa.empty() && sb.empty() && a.op != GuardOp::kOther &&
                           b.op != GuardOp::kOther;
  if (both_guards) return false;
  if (sa.empty() && sb.empty()) return sa.start_byte == sb.start_byte;
  return sa.start_byte <= sb.end_byte && sb.start_byte <= sa.end_byte;
}

int rank(GuardOp op) {
  switch (op) {
    case GuardOp::kUnlock: return 0;
    case GuardOp::kLock: return 1;
    case GuardOp::kOther: return 2;
  }
  return 3;
}

}  // namespace

CoalesceResult coalesce(std::vector<Patch> patches, std::string_view text) {
  CoalesceResult result;

  std::set<std::tuple<Template, std::size_t, std::string>> seen;
  for (auto& patch : patches) {
    if (patch.empty()) continue;
    if (!seen.emplace(patch.kind, patch.anchor_byte, patch.mutex.mutex_name).second) continue;

    bool clash = false;
    for (const auto& accepted : result.patches) {
      for (const auto& a : accepted.edits) {
        for (const auto& b : patch.edits) clash = clash || conflicts(a, b);
      }
    }
    if (clash) {
      result.diagnostics.push_back(
          {Severity::kNote, "ConflictingPatches",
           std::string(to_string(patch.kind)) + " patch for '" + patch.mutex.variable +
               "' at byte " + std::to_string(patch.anchor_byte) +
               " overlaps an earlier patch; deferred to the next iteration"});
      result.deferred.push_back(std::move(patch));
      continue;
    }
    result.patches.push_back(std::move(patch));
  }

  // Application order: by offset; at one offset unlocks close the
  // innermost section first, then locks open in name order.
  std::vector<Slot> order;
  for (std::size_t p = 0; p < result.patches.size(); ++p) {
    for (std::size_t e = 0; e < result.patches[p].edits.size(); ++e) order.push_back({p, e});
  }
  auto edit_of = [&](const Slot& s) -> const GuardedEdit& {
    return result.patches[s.patch].edits[s.edit];
  };
  std::stable_sort(order.begin(), order.end(), [&](const Slot& x, const Slot& y) {
    const auto& a = edit_of(x);
    const auto& b = edit_of(y);
    if (a.edit.span.start_byte != b.edit.span.start_byte) {
      return a.edit.span.start_byte < b.edit.span.start_byte;
    }
    if (rank(a.op) != rank(b.op)) return rank(a.op) < rank(b.op);
    if (a.op == GuardOp::kUnlock) return a.mutex > b.mutex;
    if (a.op == GuardOp::kLock) return a.mutex < b.mutex;
    return false;
  });

  // Merge "unlock(m) <trivia> lock(m)" pairs until none remain.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto& u = edit_of(order[i]);
      const auto& l = edit_of(order[i + 1]);
      if (u.op != GuardOp::kUnlock || l.op != GuardOp::kLock || u.mutex != l.mutex) continue;
      if (!u.mergeable || !l.mergeable) continue;
      const std::size_t from = u.edit.span.start_byte;
      const std::size_t to = l.edit.span.start_byte;
      if (to < from || !only_trivia(text.substr(from, to - from))) continue;
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(i),
                  order.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      merged = true;
      break;
    }
  }

  // Rebuild each patch with its surviving edits in application order.
  std::vector<std::vector<GuardedEdit>> kept(result.patches.size());
  for (const auto& slot : order) kept[slot.patch].push_back(edit_of(slot));
  for (std::size_t p = 0; p < result.patches.size(); ++p) {
    result.patches[p].edits = std::move(kept[p]);
  }
  return result;
}

std::vector<source::TextEdit> collect_edits(const std::vector<Patch>& patches) {
  std::vector<source::TextEdit> edits;
  std::set<std::string> declared;
  for (const auto& patch : patches) {
    if (patch.mutex.already_declared || !patch.mutex.decl_insertion) continue;
    if (declared.insert(patch.mutex.mutex_name).second) {
      edits.push_back(*patch.mutex.decl_insertion);
    }
  }
  // Re-derive the global application order across patches.
  std::vector<const GuardedEdit*> all;
  for (const auto& patch : patches) {
    for (const auto& e : patch.edits) all.push_back(&e);
  }
  std::stable_sort(all.begin(), all.end(), [](const GuardedEdit* a, const GuardedEdit* b) {
    if (a->edit.span.start_byte != b->edit.span.start_byte) {
      return a->edit.span.start_byte < b->edit.span.start_byte;
    }
    if (rank(a->op) != rank(b->op)) return rank(a->op) < rank(b->op);
    if (a->op == GuardOp::kUnlock) return a->mutex > b->mutex;
    if (a->op == GuardOp::kLock) return a->mutex < b->mutex;
    return false;
  });
  for (const auto* e : all) edits.push_back(e->edit);
  return edits;
}

}  // namespace racefixer::transform
