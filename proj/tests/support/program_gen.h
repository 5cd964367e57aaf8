#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace rftest {

struct GenOptions {
  int workers = 1;          // threads besides main
  int globals = 2;
  int mutexes = 1;
  int statements = 4;       // top-level statements per function
  int max_shared = 1000;    // static occurrences of globals
  bool branches = true;     // if / else / else-if
  bool loops = true;        // bounded while loops on locals
  bool locks = true;        // lock/unlock pairs around blocks
  bool noise = false;       // irregular whitespace and comments
};

// Random well-formed program in the C subset. Every generated program
// parses, compiles for the builtin detector and terminates.
std::string random_program(std::mt19937& rng, const GenOptions& options);

}  // namespace rftest
