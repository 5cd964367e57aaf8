#include "racefixer/report_parser.h"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>
#include <tuple>

namespace racefixer::report {
namespace {

constexpr std::string_view kRaceHeader = "WARNING: ThreadSanitizer: data race";
constexpr std::string_view kAnyWarning = "WARNING: ThreadSanitizer:";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool starts_with_any(std::string_view s,
                     std::initializer_list<std::string_view> prefixes) {
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](std::string_view p) { return s.starts_with(p); });
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::optional<int> parse_positive(std::string_view s) {
  int value = 0;
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) {
    return std::nullopt;
  }
  return value;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  return head(s.front()) && std::all_of(s.begin() + 1, s.end(), tail);
}

struct Frame {
  std::string file;
  SourceCoord coord;
};

// "#0 func /path/file.c:5:10 (module+0x1234)"
std::optional<Frame> parse_frame(std::string_view line) {
  line = trim(line);
  if (!line.starts_with('#')) return std::nullopt;
  auto space = line.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  line = trim(line.substr(space + 1));
  space = line.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  std::string_view location = trim(line.substr(space + 1));
  if (location.ends_with(')')) {
    const auto open = location.rfind(" (");
    if (open != std::string_view::npos) location = trim(location.substr(0, open));
  }
  const auto col_sep = location.rfind(':');
  if (col_sep == std::string_view::npos) return std::nullopt;
  const auto line_sep = location.rfind(':', col_sep == 0 ? 0 : col_sep - 1);
  if (line_sep == std::string_view::npos || line_sep >= col_sep) {
    return std::nullopt;
  }
  const auto line_no = parse_positive(location.substr(line_sep + 1, col_sep - line_sep - 1));
  const auto col_no = parse_positive(location.substr(col_sep + 1));
  if (!line_no || !col_no) return std::nullopt;
  return Frame{std::string(location.substr(0, line_sep)), {*line_no, *col_no}};
}

struct BlockState {
  enum class Section { kNone, kCurrent, kPrevious };
  Section section = Section::kNone;
  bool want_frame = false;
  std::optional<Frame> current;
  std::optional<Frame> previous;
  std::optional<std::string> variable;
  std::optional<std::string> unsupported_location;
  std::string bad_frame;
};

void finish_block(const BlockState& block, std::size_t header_line,
                  ParseResult& result) {
  const std::string where = "data race block at line " + std::to_string(header_line);
  if (!block.bad_frame.empty()) {
    result.diagnostics.push_back({Severity::kError, "MalformedBlock",
                                  where + ": unparseable frame '" + block.bad_frame + "'"});
    return;
  }
  if (!block.current) {
    result.diagnostics.push_back({Severity::kError, "MalformedBlock",
                                  where + ": missing access frame"});
    return;
  }
  if (!block.previous) {
    result.diagnostics.push_back({Severity::kError, "MalformedBlock",
                                  where + ": missing previous-access frame"});
    return;
  }
  if (block.unsupported_location) {
    result.diagnostics.push_back({Severity::kWarning, "Unsupported",
                                  where + ": non-global location '" +
                                      *block.unsupported_location + "'"});
    return;
  }
  if (!block.variable) {
    result.diagnostics.push_back({Severity::kError, "MalformedBlock",
                                  where + ": missing 'Location is global' line"});
    return;
  }
  result.races.insert(DataRace(*block.variable, block.current->coord,
                               block.previous->coord, block.current->file));
}

}  // namespace

DataRace::DataRace(std::string variable, SourceCoord a, SourceCoord b,
                   std::string file)
    : variable(std::move(variable)),
      first(std::min(a, b)),
      second(std::max(a, b)),
      file(std::move(file)) {}

bool DataRace::same_race(const DataRace& other) const {
  return variable == other.variable && first == other.first &&
         second == other.second;
}

bool race_less(const DataRace& a, const DataRace& b) {
  return std::tie(a.variable, a.first, a.second, a.file) <
         std::tie(b.variable, b.first, b.second, b.file);
}

RaceSet::RaceSet(std::initializer_list<DataRace> races) {
  for (const auto& race : races) insert(race);
}

bool RaceSet::insert(DataRace race) {
  race = DataRace(std::move(race.variable), race.first, race.second,
                  std::move(race.file));
  auto it = std::find_if(races_.begin(), races_.end(),
                         [&](const DataRace& r) { return r.same_race(race); });
  if (it != races_.end()) {
    if (race.file < it->file) it->file = race.file;
    return false;
  }
  races_.insert(std::upper_bound(races_.begin(), races_.end(), race, race_less),
                std::move(race));
  return true;
}

ParseResult parse_report(std::string_view text) {
  ParseResult result;
  const auto lines = split_lines(text);

  std::optional<BlockState> block;
  std::size_t header_line = 0;
  auto close = [&] {
    if (block) finish_block(*block, header_line, result);
    block.reset();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.starts_with(kAnyWarning)) {
      close();
      if (line.starts_with(kRaceHeader)) {
        block.emplace();
        header_line = i + 1;
      } else {
        result.diagnostics.push_back(
            {Severity::kNote, "Unsupported",
             "line " + std::to_string(i + 1) + ": ignoring report kind '" +
                 std::string(trim(line.substr(kAnyWarning.size()))) + "'"});
      }
      continue;
    }
    if (!block) continue;
    if (line.starts_with("SUMMARY:") || (line.size() >= 5 && line.find_first_not_of('=') == std::string_view::npos)) {
      close();
      continue;
    }

    using Section = BlockState::Section;
    if (starts_with_any(line, {"Write of size", "Read of size",
                               "Atomic write of size", "Atomic read of size"})) {
      block->section = Section::kCurrent;
      block->want_frame = !block->current.has_value();
    } else if (line.starts_with("Previous ")) {
      block->section = Section::kPrevious;
      block->want_frame = !block->previous.has_value();
    } else if (line.starts_with("Location is global '")) {
      const auto open = line.find('\'');
      const auto shut = line.find('\'', open + 1);
      const auto name = shut == std::string_view::npos
                            ? std::string_view{}
                            : line.substr(open + 1, shut - open - 1);
      if (is_identifier(name)) {
        block->variable = std::string(name);
      } else {
        block->bad_frame = std::string(line);
      }
      block->section = Section::kNone;
    } else if (line.starts_with("Location is ")) {
      block->unsupported_location = std::string(line.substr(12));
      block->section = Section::kNone;
    } else if (line.starts_with('#')) {
      if (block->want_frame) {
        block->want_frame = false;
        auto frame = parse_frame(line);
        if (!frame) {
          block->bad_frame = std::string(line);
        } else if (block->section == Section::kCurrent) {
          block->current = std::move(frame);
        } else if (block->section == Section::kPrevious) {
          block->previous = std::move(frame);
        }
      }
    } else if (!line.empty()) {
      // Thread creation stacks, mutex descriptions and the like.
      block->section = Section::kNone;
      block->want_frame = false;
    }
  }
  close();
  return result;
}

RaceSet merge_runs(std::span<const RaceSet> sets) {
  RaceSet merged;
  for (const auto& set : sets) {
    for (const auto& race : set) merged.insert(race);
  }
  return merged;
}

std::string format_summary(const RaceSet& set) {
  std::ostringstream out;
  for (const auto& race : set) {
    out << race.variable << ' ' << race.first.line << ' ' << race.first.column
        << ' ' << race.second.line << ' ' << race.second.column << '\n';
  }
  return out.str();
}

}  // namespace racefixer::report
