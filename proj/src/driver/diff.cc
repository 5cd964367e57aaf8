#include <algorithm>
#include <sstream>
#include <vector>

#include "racefixer/driver.h"

namespace racefixer::driver {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    lines.push_back(text.substr(start, end - start));
    start = end;
  }
  return lines;
}

enum class Tag { kKeep, kDelete, kInsert };

struct Line {
  Tag tag;
  std::string_view text;
  std::size_t a;  // 0-based index in `before` (next line for inserts)
  std::size_t b;
};

// Longest-common-subsequence alignment; ties prefer deletions first.
std::vector<Line> align(const std::vector<std::string_view>& a,
                        const std::vector<std::string_view>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<Line> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      out.push_back({Tag::kKeep, a[i], i, j});
      ++i;
      ++j;
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      out.push_back({Tag::kDelete, a[i], i, j});
      ++i;
    } else {
      out.push_back({Tag::kInsert, b[j], i, j});
      ++j;
    }
  }
  return out;
}

void put(std::ostringstream& os, char prefix, std::string_view text) {
  os << prefix << text;
  if (text.empty() || text.back() != '\n') os << "\n\\ No newline at end of file\n";
}

}  // namespace

std::string render_diff(std::string_view before, std::string_view after,
                        std::string_view before_name, std::string_view after_name) {
  if (before == after) return {};
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  const auto lines = align(a, b);
  constexpr std::size_t kContext = 3;

  std::ostringstream os;
  os << "--- " << before_name << "\n+++ " << after_name << '\n';
  std::size_t k = 0;
  while (k < lines.size()) {
    while (k < lines.size() && lines[k].tag == Tag::kKeep) ++k;
    if (k == lines.size()) break;
    const std::size_t start = k >= kContext ? k - kContext : 0;
    // Extend while the gap to the next change is small enough to share context.
    std::size_t end = k;
    for (;;) {
      while (end < lines.size() && lines[end].tag != Tag::kKeep) ++end;
      std::size_t keep = end;
      while (keep < lines.size() && lines[keep].tag == Tag::kKeep) ++keep;
      if (keep < lines.size() && keep - end <= 2 * kContext) {
        end = keep;
        continue;
      }
      end = std::min(lines.size(), end + kContext);
      break;
    }
    std::size_t a_count = 0;
    std::size_t b_count = 0;
    for (std::size_t x = start; x < end; ++x) {
      if (lines[x].tag != Tag::kInsert) ++a_count;
      if (lines[x].tag != Tag::kDelete) ++b_count;
    }
    const std::size_t a_start = lines[start].a + (a_count ? 1 : 0);
    const std::size_t b_start = lines[start].b + (b_count ? 1 : 0);
    os << "@@ -" << a_start;
    if (a_count != 1) os << ',' << a_count;
    os << " +" << b_start;
    if (b_count != 1) os << ',' << b_count;
    os << " @@\n";
    for (std::size_t x = start; x < end; ++x) {
      const char prefix = lines[x].tag == Tag::kKeep ? ' ' : lines[x].tag == Tag::kDelete ? '-' : '+';
      put(os, prefix, lines[x].text);
    }
    k = end;
  }
  return os.str();
}

}  // namespace racefixer::driver
