#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace checklist {

enum class ErrorCode {
  InvalidArgument,
  InvalidSchema,
  EmptyColumn,
  NonNumericContinuous,
  NonBinaryColumn,
  UnknownItem,
  DoubleComplement,
  OneClassOnly,
  IndexOutOfRange,
  BoundInversion,
  InfeasibleByConstruction,
  UnknownGroup,
  MissingGroups,
  TooFewRows,
  ParseError,
  IoError,
  Overflow,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::NonNumericContinuous: return "NonNumericContinuous";
    case ErrorCode::NonBinaryColumn: return "NonBinaryColumn";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::DoubleComplement: return "DoubleComplement";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BoundInversion: return "BoundInversion";
    case ErrorCode::InfeasibleByConstruction: return "InfeasibleByConstruction";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::MissingGroups: return "MissingGroups";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) throw Error(code, message);
}

}  // namespace checklist
