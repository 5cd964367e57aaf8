#include <algorithm>
#include <ostream>

#include "racefixer/race_detector.h"

namespace racefixer::detect {

void VectorClock::set(ThreadId t, std::uint32_t value) {
  if (static_cast<std::size_t>(t) >= c_.size()) c_.resize(t + 1, 0);
  c_[t] = value;
}

void VectorClock::join(const VectorClock& other) {
  if (other.c_.size() > c_.size()) c_.resize(other.c_.size(), 0);
  for (std::size_t i = 0; i < other.c_.size(); ++i) c_[i] = std::max(c_[i], other.c_[i]);
}

bool VectorClock::leq(const VectorClock& other) const {
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] > other.get(static_cast<ThreadId>(i))) return false;
  }
  return true;
}

bool operator==(const VectorClock& a, const VectorClock& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.get(static_cast<ThreadId>(i)) != b.get(static_cast<ThreadId>(i))) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const VectorClock& clock) {
  os << '(';
  for (std::size_t i = 0; i < clock.size(); ++i) {
    if (i) os << ',';
    os << clock.get(static_cast<ThreadId>(i));
  }
  return os << ')';
}

}  // namespace racefixer::detect
