#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reqeq {

enum class ErrorCode {
  // logic-ir
  UnboundVariable,
  SortError,
  MalformedIr,
  // equiv-engine
  PlanTooLarge,
  SignatureMismatch,
  // frontends
  ParseError,
  UnsupportedPhrase,
  ConflictingSort,
  TableShapeError,
  UnboundPlaceholder,
  // grounding
  SortMismatch,
  AliasToUndeclared,
  InvalidGrounding,
  // lean-bridge
  EmitUnsupported,
  LeanParseError,
  UnsupportedLean,
  // llm-formalizer
  ServiceUnreachable,
  Timeout,
  NoCodeBlock,
  InvalidLean,
  ReplayMismatch,
  // cli
  Usage,
  Io,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnboundVariable: return "UNBOUND_VARIABLE";
    case ErrorCode::SortError: return "SORT_ERROR";
    case ErrorCode::MalformedIr: return "MALFORMED_IR";
    case ErrorCode::PlanTooLarge: return "PLAN_TOO_LARGE";
    case ErrorCode::SignatureMismatch: return "SIGNATURE_MISMATCH";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::UnsupportedPhrase: return "UNSUPPORTED_PHRASE";
    case ErrorCode::ConflictingSort: return "CONFLICTING_SORT";
    case ErrorCode::TableShapeError: return "TABLE_SHAPE_ERROR";
    case ErrorCode::UnboundPlaceholder: return "UNBOUND_PLACEHOLDER";
    case ErrorCode::SortMismatch: return "SORT_MISMATCH";
    case ErrorCode::AliasToUndeclared: return "ALIAS_TO_UNDECLARED";
    case ErrorCode::InvalidGrounding: return "INVALID_GROUNDING";
    case ErrorCode::EmitUnsupported: return "EMIT_UNSUPPORTED";
    case ErrorCode::LeanParseError: return "LEAN_PARSE_ERROR";
    case ErrorCode::UnsupportedLean: return "UNSUPPORTED_LEAN";
    case ErrorCode::ServiceUnreachable: return "SERVICE_UNREACHABLE";
    case ErrorCode::Timeout: return "TIMEOUT";
    case ErrorCode::NoCodeBlock: return "NO_CODE_BLOCK";
    case ErrorCode::InvalidLean: return "INVALID_LEAN";
    case ErrorCode::ReplayMismatch: return "REPLAY_MISMATCH";
    case ErrorCode::Usage: return "USAGE";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Position inside a source text. Lines and columns are 1-based; zero means
/// "not known".
struct SourceLocation {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t offset = 0;

  [[nodiscard]] bool known() const { return line != 0; }

  [[nodiscard]] std::string str() const {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line != 0) {
      out += ":" + std::to_string(line);
      if (column != 0) out += ":" + std::to_string(column);
    }
    return out;
  }
};

/// Every failure in the library surfaces as this exception. `what()` carries
/// the code name, the location when known, and the detail message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, SourceLocation where = {})
      : std::runtime_error(format(code, detail, where)),
        code_(code),
        detail_(std::move(detail)),
        where_(std::move(where)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }
  [[nodiscard]] const SourceLocation& where() const noexcept { return where_; }

 private:
  static std::string format(ErrorCode code, const std::string& detail,
                            const SourceLocation& where) {
    std::string out(error_code_name(code));
    if (where.known()) out += " at " + where.str();
    out += ": " + detail;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  SourceLocation where_;
};

}  // namespace reqeq
