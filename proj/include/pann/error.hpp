#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pann {

enum class ErrorCode {
  SingularTensor,
  InvertedConfiguration,
  InvalidStretch,
  NotIsochoric,
  ShapeMismatch,
  EmptyDataset,
  EmptyGrid,
  InvalidArgument,
  ParseError,
  FileNotFound,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularTensor: return "SingularTensor";
    case ErrorCode::InvertedConfiguration: return "InvertedConfiguration";
    case ErrorCode::InvalidStretch: return "InvalidStretch";
    case ErrorCode::NotIsochoric: return "NotIsochoric";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a stable error code; what() reads "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pann
