#include "racefixer/common.h"

namespace racefixer {

std::ostream& operator<<(std::ostream& os, const SourceCoord& coord) {
  return os << coord.line << ':' << coord.column;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kOverlap: return "OverlapError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kUnsupportedControlFlow: return "UnsupportedControlFlow";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kConflictingPatches: return "ConflictingPatches";
    case ErrorCode::kUnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* to_string(Severity severity) {
  switch (severity) {
    case Severity::kNote: return "note";
    case Severity::kWarning: return "warning";
    case Severity::kError: return "error";
  }
  return "unknown";
}

std::string render(const Diagnostic& diagnostic, const std::string& tool) {
  std::string out = tool + ": " + to_string(diagnostic.severity) + ": ";
  if (!diagnostic.code.empty()) out += diagnostic.code + ": ";
  out += diagnostic.message;
  return out;
}

}  // namespace racefixer
