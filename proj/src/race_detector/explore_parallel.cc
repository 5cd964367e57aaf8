#include <omp.h>

#include <atomic>

#include "racefixer/race_detector.h"
#include "search.h"

namespace racefixer::detect {

Verdict explore_parallel(std::shared_ptr<const Program> program, const ExploreOptions& options,
                         int workers) {
  if (workers <= 0) workers = omp_get_max_threads();
  detail::Collector out;
  detail::Frame root = detail::root_frame(program, options.limits, out);
  if (root.choices.empty()) {
    detail::search(std::move(root), out, options.bound);
    return std::move(out).finish(std::move(program), options.bound);
  }

  // Split the top of the tree breadth-first until there is enough work to
  // share, then search each subtree independently.
  const std::size_t wanted = static_cast<std::size_t>(workers) * 8;
  std::vector<detail::Frame> frontier;
  frontier.push_back(std::move(root));
  for (int round = 0; round < 32 && !frontier.empty() && frontier.size() < wanted; ++round) {
    if (out.explored >= options.bound) break;
    std::vector<detail::Frame> next;
    for (auto& frame : frontier) {
      while (frame.next < frame.choices.size()) {
        if (auto child = detail::expand(frame, out)) next.push_back(std::move(*child));
      }
    }
    frontier = std::move(next);
  }

  std::vector<detail::Collector> parts(frontier.size());
  std::atomic<std::uint64_t> leaves = out.explored;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    detail::search(std::move(frontier[i]), parts[i], options.bound, &leaves);
  }
  for (auto& part : parts) out.merge(std::move(part));
  return std::move(out).finish(std::move(program), options.bound);
}

Verdict explore_parallel(const source::CstNode& unit, const ExploreOptions& options,
                         int workers) {
  return explore_parallel(Program::compile(unit), options, workers);
}

}  // namespace racefixer::detect
