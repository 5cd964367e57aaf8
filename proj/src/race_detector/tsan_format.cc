#include <cstdio>
#include <sstream>

#include "racefixer/race_detector.h"

namespace racefixer::detect {
namespace {

std::string address(int variable) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%012x", 0x601040 + 8 * variable);
  return buf;
}

std::string actor(ThreadId t) { return t == 0 ? "main thread" : "thread T" + std::to_string(t); }

std::string access(const AccessRecord& r) {
  return r.kind == AccessKind::kWrite ? "write" : "read";
}

}  // namespace

std::string render_tsan_log(const Verdict& verdict, std::string_view path) {
  std::ostringstream os;
  const int pid = 4242;
  for (const auto& race : verdict.races) {
    const Machine m = replay(verdict.program, race.witness);
    auto function_of = [&](ThreadId t) {
      return verdict.program->functions[m.threads().at(t).function].name;
    };
    auto frame = [&](const AccessRecord& r) {
      os << "    #0 " << function_of(r.thread) << ' ' << path << ':' << r.where.line << ':'
         << r.where.column << " (racefixer+0x" << std::hex << (0x4000 + 16 * r.where.line)
         << std::dec << ")\n";
    };
    std::string later = access(race.later);
    later[0] = static_cast<char>(later[0] - 'a' + 'A');
    os << "==================\n"
       << "WARNING: ThreadSanitizer: data race (pid=" << pid << ")\n"
       << "  " << later << " of size 4 at " << address(race.later.variable) << " by "
       << actor(race.later.thread) << ":\n";
    frame(race.later);
    os << "  Previous " << access(race.earlier) << " of size 4 at "
       << address(race.earlier.variable) << " by " << actor(race.earlier.thread) << ":\n";
    frame(race.earlier);
    os << "  Location is global '" << race.variable << "' of size 4 at "
       << address(race.later.variable) << " (racefixer+" << address(race.later.variable)
       << ")\n";
    os << "SUMMARY: ThreadSanitizer: data race " << path << ':' << race.later.where.line << ':'
       << race.later.where.column << " in " << function_of(race.later.thread) << '\n';
  }
  os << "==================\n"
     << "ThreadSanitizer: reported " << verdict.races.size() << " warnings\n";
  return os.str();
}

}  // namespace racefixer::detect
