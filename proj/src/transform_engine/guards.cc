#include "lock_walk.h"
#include "racefixer/transform_engine.h"

namespace racefixer::transform {

bool is_guarded(const source::StatementHandle& handle, std::string_view mutex) {
  if (!handle.function || !handle.node) return false;
  bool held = false;
  detail::LockWalker walker([&](std::string_view m) { return m == mutex; },
                            [&](const source::CstNode& stmt, const detail::HeldSet& state) {
                              if (&stmt == handle.node) held = state.contains(mutex);
                            },
                            nullptr);
  walker.walk_function(*handle.function);
  return held;
}

}  // namespace racefixer::transform
