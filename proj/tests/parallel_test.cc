#include <random>

#include <gtest/gtest.h>

#include "files.h"
#include "oracle.h"
#include "program_gen.h"
#include "racefixer/race_detector.h"

namespace {

using namespace racefixer;
using namespace racefixer::detect;

void expect_same(const Verdict& serial, const Verdict& parallel, const std::string& context) {
  EXPECT_EQ(serial.explored, parallel.explored) << context;
  EXPECT_EQ(serial.truncated, parallel.truncated) << context;
  EXPECT_EQ(serial.diagnostics, parallel.diagnostics) << context;
  ASSERT_EQ(serial.races.size(), parallel.races.size()) << context;
  for (std::size_t i = 0; i < serial.races.size(); ++i) {
    EXPECT_EQ(serial.races[i].key(), parallel.races[i].key()) << context;
    EXPECT_EQ(serial.races[i].witness, parallel.races[i].witness) << context;
  }
  ASSERT_EQ(serial.lockset_races.size(), parallel.lockset_races.size()) << context;
  for (std::size_t i = 0; i < serial.lockset_races.size(); ++i) {
    EXPECT_EQ(serial.lockset_races[i].key(), parallel.lockset_races[i].key()) << context;
  }
  ASSERT_EQ(serial.deadlocks.size(), parallel.deadlocks.size()) << context;
  for (std::size_t i = 0; i < serial.deadlocks.size(); ++i) {
    EXPECT_EQ(serial.deadlocks[i].schedule, parallel.deadlocks[i].schedule) << context;
    EXPECT_EQ(serial.deadlocks[i].threads, parallel.deadlocks[i].threads) << context;
  }
}

TEST(ParallelExplore, MatchesSerialOnFixtures) {
  for (const auto& path : rftest::fixture_files()) {
    const auto program = Program::compile(source::parse_source(rftest::read_file(path)));
    const auto serial = explore(program);
    for (int workers : {1, 2, 4}) {
      expect_same(serial, explore_parallel(program, {}, workers),
                  path.filename().string() + " workers=" + std::to_string(workers));
    }
  }
}

TEST(ParallelExplore, MatchesSerialOnRandomPrograms) {
  std::mt19937 rng(8);
  rftest::GenOptions o;
  o.max_shared = 5;
  for (int i = 0; i < 60; ++i) {
    o.workers = 1 + i % 2;
    o.loops = i % 5 == 0;
    const std::string text = rftest::random_program(rng, o);
    const auto program = Program::compile(source::parse_source(text));
    ExploreOptions options;
    options.bound = 200'000;
    const auto serial = explore(program, options);
    ASSERT_FALSE(serial.truncated) << text;
    expect_same(serial, explore_parallel(program, options, 3), text);
  }
}

TEST(ParallelExplore, BoundIsRespected) {
  const auto program =
      Program::compile(source::parse_source(rftest::read_file(rftest::fixture("three_threads.c"))));
  ExploreOptions options;
  options.bound = 7;
  const auto serial = explore(program, options);
  const auto parallel = explore_parallel(program, options, 4);
  EXPECT_TRUE(serial.truncated);
  EXPECT_TRUE(parallel.truncated);
  EXPECT_EQ(serial.explored, 7u);
  EXPECT_EQ(parallel.explored, 7u);
  // Whatever a truncated search reports is a real race.
  const auto full = rftest::as_oracle(explore(program));
  for (const auto& r : rftest::as_oracle(parallel)) EXPECT_TRUE(full.contains(r));
}

}  // namespace
