#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "racefixer/driver.h"
#include "racefixer/race_detector.h"
#include "racefixer/report_parser.h"
#include "racefixer/source_model.h"

namespace {

using namespace racefixer;

constexpr int kExitClean = 0;
constexpr int kExitRacesRemain = 1;
constexpr int kExitDeadlock = 2;
constexpr int kExitInputError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, const std::string& tool) {
  for (const auto& d : diagnostics) std::cerr << render(d, tool) << '\n';
}

const char* kind_name(detect::AccessKind kind) {
  return kind == detect::AccessKind::kWrite ? "write" : "read";
}

void print_verdict(const detect::Verdict& v, std::ostream& os) {
  for (const auto& r : v.races) {
    os << "race " << r.variable << ": " << kind_name(r.earlier.kind) << " at " << r.earlier.where
       << " by T" << r.earlier.thread << ", " << kind_name(r.later.kind) << " at " << r.later.where
       << " by T" << r.later.thread << "; schedule";
    for (auto t : r.witness) os << ' ' << t;
    os << '\n';
  }
  for (const auto& d : v.deadlocks) {
    os << "deadlock; schedule";
    for (auto t : d.schedule) os << ' ' << t;
    os << '\n';
    for (const auto& line : d.threads) os << "  " << line << '\n';
  }
  os << "explored=" << v.explored << " races=" << v.races.size()
     << " deadlocks=" << v.deadlocks.size() << (v.truncated ? " truncated" : "") << '\n';
}

int run_parse_report(const std::string& path) {
  auto parsed = report::parse_report(read_file(path));
  std::cout << report::format_summary(parsed.races);
  print_diagnostics(parsed.diagnostics, "rf-parse");
  return kExitClean;
}

int run_detect(const std::string& path, bool tsan_format, std::uint64_t bound,
               const std::string& mode) {
  const std::string text = read_file(path);
  const auto tree = source::parse_source(text);
  detect::ExploreOptions options;
  options.bound = bound;
  const auto verdict = detect::explore(tree, options);
  if (tsan_format) {
    std::cout << detect::render_tsan_log(verdict, path);
  } else {
    print_verdict(verdict, std::cout);
  }
  auto vm = mode == "lockset" ? detect::VerdictMode::kLockset
            : mode == "union" ? detect::VerdictMode::kUnion
                              : detect::VerdictMode::kHappensBefore;
  const auto hybrid = detect::hybrid_verdict(verdict.races, verdict.lockset_races, vm, path);
  print_diagnostics(verdict.diagnostics, "rf-detect");
  print_diagnostics(hybrid.advisories, "rf-detect");
  return hybrid.races.empty() && verdict.deadlocks.empty() ? kExitClean : kExitRacesRemain;
}

void print_iterations(const driver::FixReport& rep, std::ostream& os) {
  for (std::size_t i = 0; i < rep.iterations.size(); ++i) {
    const auto& it = rep.iterations[i];
    os << "iteration " << i + 1 << ": " << it.found.size() << " race(s)\n";
    for (const auto& r : it.found) {
      os << "  found " << r.variable << ' ' << r.first << ' ' << r.second << '\n';
    }
    for (const auto& p : it.applied) {
      os << "  applied " << transform::to_string(p.kind) << " at " << p.anchor << " using "
         << p.mutex << '\n';
    }
    for (const auto& s : it.skipped) {
      os << "  skipped " << s.race.variable << ' ' << s.race.first << ' ' << s.race.second
         << ": " << s.reason << '\n';
    }
    if (it.after) {
      os << "  after patching: races=" << it.after->races << " deadlocks=" << it.after->deadlocks
         << " explored=" << it.after->explored << (it.after->truncated ? " truncated" : "")
         << (it.rolled_back ? " (rolled back)" : "") << '\n';
    }
  }
  os << "status: " << driver::to_string(rep.status) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repairs data races in pthread C programs by inserting mutex locks"};
  app.require_subcommand(1);

  driver::FixConfig config;
  std::string detector = "builtin";
  std::string lockset_mode = "hb";
  bool in_place = false;
  bool diff = false;
  bool verbose = false;
  std::string log_path;
  auto* fix = app.add_subcommand("fix", "Detect and repair races until the program is clean");
  fix->add_option("source", config.source_path, "C source file")->required();
  fix->add_option("--detector", detector, "Race detector")
      ->check(CLI::IsMember({"builtin", "report"}));
  fix->add_option("--report", config.report_paths, "Sanitizer log (repeatable)");
  fix->add_option("--max-iterations", config.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber);
  fix->add_option("--bound", config.bound, "Maximum interleavings per exploration")
      ->check(CLI::PositiveNumber);
  auto* in_place_flag = fix->add_flag("--in-place", in_place, "Rewrite the source file");
  auto* out_opt = fix->add_option("--out", config.out_path, "Write the result to this path");
  auto* diff_flag = fix->add_flag("--diff", diff, "Print a unified diff (default)");
  in_place_flag->excludes(out_opt)->excludes(diff_flag);
  out_opt->excludes(diff_flag);
  fix->add_option("--lockset-mode", lockset_mode, "Verdict mode")
      ->check(CLI::IsMember({"hb", "lockset", "union"}));
  fix->add_flag("--verbose", verbose, "Print per-iteration details");
  fix->add_option("--log", log_path, "Write the machine-readable iteration log here");

  std::string parse_path;
  auto* parse = app.add_subcommand("parse-report", "Summarize a sanitizer race log");
  parse->add_option("path", parse_path, "Log file")->required();

  std::string detect_path;
  bool tsan_format = false;
  std::uint64_t detect_bound = 100'000;
  std::string detect_mode = "hb";
  auto* detect_cmd = app.add_subcommand("detect", "Run the builtin race detector");
  detect_cmd->add_option("source", detect_path, "C source file")->required();
  detect_cmd->add_flag("--tsan-format", tsan_format, "Print a sanitizer-style log");
  detect_cmd->add_option("--bound", detect_bound, "Maximum interleavings")
      ->check(CLI::PositiveNumber);
  detect_cmd->add_option("--lockset-mode", detect_mode, "Verdict mode")
      ->check(CLI::IsMember({"hb", "lockset", "union"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  std::string tool = "rf-fix";
  try {
    if (*parse) {
      tool = "rf-parse";
      return run_parse_report(parse_path);
    }
    if (*detect_cmd) {
      tool = "rf-detect";
      return run_detect(detect_path, tsan_format, detect_bound, detect_mode);
    }
    config.detector = detector == "report" ? driver::DetectorKind::kReport
                                           : driver::DetectorKind::kBuiltin;
    config.lockset_mode = lockset_mode == "lockset" ? detect::VerdictMode::kLockset
                          : lockset_mode == "union" ? detect::VerdictMode::kUnion
                                                    : detect::VerdictMode::kHappensBefore;
    config.output = in_place                  ? driver::OutputMode::kInPlace
                    : !config.out_path.empty() ? driver::OutputMode::kNewFile
                                               : driver::OutputMode::kDiffOnly;
    const auto rep = driver::run(config);
    if (config.output == driver::OutputMode::kDiffOnly) {
      std::cout << driver::render_diff(rep.original, rep.result, "a/" + config.source_path,
                                       "b/" + config.source_path);
    }
    if (verbose) print_iterations(rep, std::cerr);
    print_diagnostics(rep.diagnostics, "rf-fix");
    if (!log_path.empty()) {
      std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
      if (!log) throw Error(ErrorCode::kIo, log_path + ": cannot open for writing");
      log << driver::serialize(rep);
    }
    switch (rep.status) {
      case driver::FixStatus::kClean: return kExitClean;
      case driver::FixStatus::kDeadlockIntroduced: return kExitDeadlock;
      default: return kExitRacesRemain;
    }
  } catch (const source::SyntaxError& e) {
    std::cerr << tool << ": error: " << config.source_path << detect_path << ':' << e.what()
              << '\n';
  } catch (const Error& e) {
    std::cerr << tool << ": error: " << to_string(e.code()) << ": " << e.what() << '\n';
  }
  return kExitInputError;
}
