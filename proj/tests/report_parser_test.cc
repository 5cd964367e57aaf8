#include <random>

#include <gtest/gtest.h>

#include "files.h"
#include "racefixer/report_parser.h"

namespace {

using namespace racefixer;
using namespace racefixer::report;

std::string sample_log() { return rftest::read_file(rftest::golden("sample_report.log")); }

TEST(ParseReport, SampleLogYieldsOneRace) {
  const auto result = parse_report(sample_log());
  ASSERT_EQ(result.races.size(), 1u);
  const DataRace& race = result.races.races().front();
  EXPECT_EQ(race.variable, "Global");
  EXPECT_EQ(race.first, (SourceCoord{5, 10}));
  EXPECT_EQ(race.second, (SourceCoord{12, 10}));
  EXPECT_EQ(race.file, "/home/sanjay/llvm/source/sample_codes/race.c");
  EXPECT_TRUE(result.diagnostics.empty());
  EXPECT_EQ(format_summary(result.races), "Global 5 10 12 10\n");
}

TEST(ParseReport, EmptyTextIsEmptySet) {
  const auto result = parse_report("");
  EXPECT_TRUE(result.races.empty());
  EXPECT_TRUE(result.diagnostics.empty());
}

TEST(ParseReport, RepeatedLogDeduplicates) {
  const std::string log = sample_log();
  const auto result = parse_report(log + log + log);
  EXPECT_EQ(result.races, parse_report(log).races);
}

TEST(ParseReport, InterleavedProgramOutputIsIgnored) {
  const auto result = parse_report("hello\n" + sample_log() + "exit code 66\n");
  EXPECT_EQ(format_summary(result.races), "Global 5 10 12 10\n");
}

TEST(ParseReport, ReadAfterWriteSectionsInEitherOrder) {
  const std::string log =
      "WARNING: ThreadSanitizer: data race (pid=1)\n"
      "  Read of size 4 at 0x1 by main thread:\n"
      "    #0 main /tmp/a.c:20:7 (a.out+0x1)\n"
      "    #1 helper /tmp/a.c:30:1 (a.out+0x2)\n"
      "  Previous write of size 4 at 0x1 by thread T2:\n"
      "    #0 worker /tmp/a.c:3:9 (a.out+0x3)\n"
      "  Location is global 'flag' of size 4 at 0x1 (a.out+0x1)\n"
      "SUMMARY: ThreadSanitizer: data race /tmp/a.c:20:7 in main\n";
  const auto result = parse_report(log);
  ASSERT_EQ(result.races.size(), 1u);
  const auto& race = result.races.races().front();
  EXPECT_EQ(race.variable, "flag");
  // Canonical order puts the smaller coordinate first.
  EXPECT_EQ(race.first, (SourceCoord{3, 9}));
  EXPECT_EQ(race.second, (SourceCoord{20, 7}));
}

TEST(ParseReport, HeapLocationIsUnsupportedDiagnostic) {
  const std::string log =
      "WARNING: ThreadSanitizer: data race (pid=1)\n"
      "  Write of size 4 at 0x1 by thread T1:\n"
      "    #0 f /tmp/a.c:3:3 (a.out+0x1)\n"
      "  Previous write of size 4 at 0x1 by main thread:\n"
      "    #0 main /tmp/a.c:9:3 (a.out+0x2)\n"
      "  Location is heap block of size 16 at 0x1 allocated by main thread:\n"
      "SUMMARY: ThreadSanitizer: data race /tmp/a.c:3:3 in f\n";
  const auto result = parse_report(log);
  EXPECT_TRUE(result.races.empty());
  ASSERT_EQ(result.diagnostics.size(), 1u);
  EXPECT_EQ(result.diagnostics.front().code, "Unsupported");
}

TEST(ParseReport, MissingPreviousSectionIsMalformed) {
  const std::string log =
      "WARNING: ThreadSanitizer: data race (pid=1)\n"
      "  Write of size 4 at 0x1 by thread T1:\n"
      "    #0 f /tmp/a.c:3:3 (a.out+0x1)\n"
      "  Location is global 'g' of size 4 at 0x1 (a.out+0x1)\n"
      "SUMMARY: ThreadSanitizer: data race /tmp/a.c:3:3 in f\n";
  const auto result = parse_report(log + sample_log());
  EXPECT_EQ(result.races.size(), 1u);
  ASSERT_EQ(result.diagnostics.size(), 1u);
  EXPECT_EQ(result.diagnostics.front().code, "MalformedBlock");
  EXPECT_EQ(result.diagnostics.front().severity, Severity::kError);
}

TEST(ParseReport, PathsWithColonsSplitOnLastTwoFields) {
  const std::string log =
      "WARNING: ThreadSanitizer: data race (pid=1)\n"
      "  Write of size 4 at 0x1 by thread T1:\n"
      "    #0 f C:/work/a:b.c:3:4 (a.out+0x1)\n"
      "  Previous read of size 4 at 0x1 by main thread:\n"
      "    #0 main C:/work/a:b.c:10:2 (a.out+0x2)\n"
      "  Location is global 'g' of size 4 at 0x1 (a.out+0x1)\n";
  const auto result = parse_report(log);
  ASSERT_EQ(result.races.size(), 1u);
  EXPECT_EQ(result.races.races().front().file, "C:/work/a:b.c");
  EXPECT_EQ(result.races.races().front().second, (SourceCoord{10, 2}));
}

TEST(ParseReport, TotalOnArbitraryText) {
  std::mt19937 rng(7);
  const std::string alphabet = "WARNING: ThreadSanitizer data race #0 Location is global ' :\n0123456789";
  const std::string log = sample_log();
  for (int i = 0; i < 300; ++i) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 400)(rng);
    for (int k = 0; k < n; ++k) {
      text += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    }
    // Also mutilate real logs by truncation.
    const std::size_t cut = std::uniform_int_distribution<std::size_t>(0, log.size())(rng);
    EXPECT_NO_THROW(parse_report(text));
    EXPECT_NO_THROW(parse_report(log.substr(0, cut)));
  }
}

TEST(DataRace, SymmetricConstructionAndIdentity) {
  const DataRace a("g", {4, 1}, {2, 2});
  const DataRace b("g", {2, 2}, {4, 1}, "x.c");
  EXPECT_EQ(a.first, (SourceCoord{2, 2}));
  EXPECT_TRUE(a.same_race(b));
  EXPECT_FALSE(a == b);
}

TEST(RaceSet, DuplicateKeepsSmallerFile) {
  RaceSet set;
  EXPECT_TRUE(set.insert(DataRace("g", {1, 1}, {2, 2}, "b.c")));
  EXPECT_FALSE(set.insert(DataRace("g", {2, 2}, {1, 1}, "a.c")));
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.races().front().file, "a.c");
}

TEST(MergeRuns, Examples) {
  const DataRace a("g", {1, 1}, {2, 2});
  const DataRace b("h", {3, 3}, {4, 4});
  const std::vector<RaceSet> empties{RaceSet{}, RaceSet{}};
  EXPECT_TRUE(merge_runs(empties).empty());
  const std::vector<RaceSet> same{RaceSet{a}, RaceSet{a}};
  EXPECT_EQ(merge_runs(same), RaceSet{a});
  const std::vector<RaceSet> two{RaceSet{b}, RaceSet{a}};
  const RaceSet merged = merge_runs(two);
  // Hand-sorted: "g" before "h".
  ASSERT_EQ(merged.size(), 2u);
  EXPECT_EQ(merged.races()[0], a);
  EXPECT_EQ(merged.races()[1], b);
  EXPECT_EQ(format_summary(merged), "g 1 1 2 2\nh 3 3 4 4\n");
  EXPECT_EQ(format_summary(RaceSet{}), "");
}

RaceSet random_set(std::mt19937& rng) {
  RaceSet set;
  const int n = std::uniform_int_distribution<int>(0, 4)(rng);
  auto coord = [&] {
    return SourceCoord{std::uniform_int_distribution<int>(1, 4)(rng),
                       std::uniform_int_distribution<int>(1, 3)(rng)};
  };
  for (int i = 0; i < n; ++i) {
    const char var = static_cast<char>('a' + std::uniform_int_distribution<int>(0, 2)(rng));
    set.insert(DataRace(std::string(1, var), coord(), coord()));
  }
  return set;
}

TEST(MergeRuns, AssociativeCommutativeIdempotent) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const RaceSet x = random_set(rng);
    const RaceSet y = random_set(rng);
    const RaceSet z = random_set(rng);
    auto merge2 = [](const RaceSet& p, const RaceSet& q) {
      const std::vector<RaceSet> v{p, q};
      return merge_runs(v);
    };
    EXPECT_EQ(merge2(x, y), merge2(y, x));
    EXPECT_EQ(merge2(merge2(x, y), z), merge2(x, merge2(y, z)));
    EXPECT_EQ(merge2(x, x), x);
    const RaceSet merged = merge2(x, y);
    EXPECT_TRUE(std::is_sorted(merged.begin(), merged.end(), race_less));
  }
}

}  // namespace
