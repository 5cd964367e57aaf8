#include <algorithm>
#include <numeric>

#include "racefixer/source_model.h"

namespace racefixer::source {

TextEdit insertion_at(std::size_t offset, std::string text) {
  TextEdit edit;
  edit.span.start_byte = offset;
  edit.span.end_byte = offset;
  edit.replacement = std::move(text);
  return edit;
}

std::string apply_edits(std::string_view text, std::vector<TextEdit> edits) {
  std::vector<std::size_t> order(edits.size());
  std::iota(order.begin(), order.end(), 0);
  // Insertions sort before a replacement starting at the same offset.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = edits[a].span;
    const auto& sb = edits[b].span;
    if (sa.start_byte != sb.start_byte) return sa.start_byte < sb.start_byte;
    return sa.empty() && !sb.empty();
  });

  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  for (const std::size_t i : order) {
    const Span& span = edits[i].span;
    if (span.start_byte > span.end_byte || span.end_byte > text.size()) {
      throw Error(ErrorCode::kOverlap, "edit span [" + std::to_string(span.start_byte) + ", " +
                                           std::to_string(span.end_byte) +
                                           ") is outside the text");
    }
    if (span.start_byte < cursor) {
      throw Error(ErrorCode::kOverlap,
                  "edit at byte " + std::to_string(span.start_byte) +
                      " overlaps a preceding edit ending at byte " + std::to_string(cursor));
    }
    out.append(text.substr(cursor, span.start_byte - cursor));
    out += edits[i].replacement;
    cursor = span.end_byte;
  }
  out.append(text.substr(cursor));
  return out;
}

}  // namespace racefixer::source
