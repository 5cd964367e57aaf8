// Times the serial and OpenMP schedule exploration on a fixed workload.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "racefixer/race_detector.h"
#include "racefixer/source_model.h"

namespace {

using namespace racefixer;

std::string workload(int threads, int accesses) {
  std::string src = "int x;\nint y;\npthread_mutex_t m = PTHREAD_MUTEX_INITIALIZER;\n";
  for (int t = 0; t < threads; ++t) {
    src += "void *w" + std::to_string(t) + "(void *arg) {\n";
    for (int a = 0; a < accesses; ++a) {
      if (a % 3 == 2) {
        src += "  pthread_mutex_lock(&m);\n  y = y + 1;\n  pthread_mutex_unlock(&m);\n";
      } else {
        src += a % 2 ? "  x = x + 1;\n" : "  y = x;\n";
      }
    }
    src += "  return 0;\n}\n";
  }
  src += "int main() {\n";
  for (int t = 0; t < threads; ++t) src += "  pthread_t t" + std::to_string(t) + ";\n";
  for (int t = 0; t < threads; ++t) {
    src += "  pthread_create(&t" + std::to_string(t) + ", 0, w" + std::to_string(t) + ", 0);\n";
  }
  for (int t = 0; t < threads; ++t) src += "  pthread_join(t" + std::to_string(t) + ", 0);\n";
  src += "  return 0;\n}\n";
  return src;
}

template <class Fn>
double seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 3;
  const int accesses = argc > 2 ? std::atoi(argv[2]) : 2;
  const auto tree = source::parse_source(workload(threads, accesses));
  const auto program = detect::Program::compile(tree);
  detect::ExploreOptions options;
  options.bound = 2'000'000;

  detect::Verdict serial;
  detect::Verdict parallel;
  const double ts = seconds([&] { serial = detect::explore(program, options); });
  const double tp = seconds([&] { parallel = detect::explore_parallel(program, options); });

  const bool same = serial.races.size() == parallel.races.size() &&
                    serial.deadlocks.size() == parallel.deadlocks.size() &&
                    serial.explored == parallel.explored;
  std::printf("workload: %d threads x %d accesses\n", threads, accesses);
  std::printf("serial   %10.3f s  explored=%llu races=%zu\n", ts,
              static_cast<unsigned long long>(serial.explored), serial.races.size());
  std::printf("parallel %10.3f s  explored=%llu races=%zu (workers=%d)\n", tp,
              static_cast<unsigned long long>(parallel.explored), parallel.races.size(),
              omp_get_max_threads());
  std::printf("speedup  %10.2fx  results %s\n", tp > 0 ? ts / tp : 0.0,
              same ? "match" : "DIFFER");
  return same ? 0 : 1;
}
