#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace racefixer {

// 1-based line and byte column, as printed by sanitizer frames.
struct SourceCoord {
  int line = 1;
  int column = 1;

  friend auto operator<=>(const SourceCoord&, const SourceCoord&) = default;
};

std::ostream& operator<<(std::ostream& os, const SourceCoord& coord);

enum class ErrorCode {
  kSyntax,
  kOverlap,
  kNotFound,
  kUnsupported,
  kUnsupportedControlFlow,
  kUnknownVariable,
  kConflictingPatches,
  kUnsupportedConstruct,
  kIo,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class Severity { kNote, kWarning, kError };

const char* to_string(Severity severity);

// Non-fatal finding attached to a result. Rendered as
// "<tool>: <severity>: <message>".
struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string code;
  std::string message;

  friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
};

std::string render(const Diagnostic& diagnostic, const std::string& tool);

}  // namespace racefixer
