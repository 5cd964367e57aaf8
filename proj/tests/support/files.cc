#include "files.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace rftest {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path fixture(const std::string& name) { return fs::path(RF_FIXTURE_DIR) / name; }
fs::path golden(const std::string& name) { return fs::path(RF_GOLDEN_DIR) / name; }

std::vector<fs::path> fixture_files() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(RF_FIXTURE_DIR)) {
    if (entry.path().extension() == ".c") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("rftest_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string normalize_listing(const std::string& text) {
  std::string s = text;
  s = std::regex_replace(s, std::regex(R"(pthread_mutex_t\s+__rf_mutex_\w+\s*=\s*PTHREAD_MUTEX_INITIALIZER\s*;)"), "");
  s = std::regex_replace(s, std::regex(R"(pthread_mutex_lock\s*\(\s*&\s*__rf_mutex_\w+\s*\))"), "lock(mutex)");
  s = std::regex_replace(s, std::regex(R"(pthread_mutex_unlock\s*\(\s*&\s*__rf_mutex_\w+\s*\))"), "unlock(mutex)");
  s = std::regex_replace(s, std::regex(R"(/\*[\s\S]*?\*/)"), "");
  std::string out;
  std::istringstream lines(s);
  std::string line;
  while (std::getline(lines, line)) {
    const auto pos = line.find("//");
    if (pos != std::string::npos) {
      const std::string comment = line.substr(pos);
      const bool marker = comment == "// lock added by RaceFixer" ||
                          comment == "// unlock added by RaceFixer";
      if (!marker) line.erase(pos);
    }
    out += line;
    out += '\n';
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](unsigned char c) { return std::isspace(c); }),
            out.end());
  return out;
}

}  // namespace rftest
