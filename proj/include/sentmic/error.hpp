#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace sentmic {

enum class ErrorKind {
  MalformedRow,
  EmptyInput,
  EmptyLexicon,
  BadProbabilityRow,
  DuplicatePostId,
  MissingScore,
  InvariantViolation,
  DegenerateRange,
  InsufficientOverlap,
  DegenerateAxis,
  LengthMismatch,
  TooLarge,
  InvalidArgument,
  IoFailure,
  BadConfig,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyLexicon: return "EmptyLexicon";
    case ErrorKind::BadProbabilityRow: return "BadProbabilityRow";
    case ErrorKind::DuplicatePostId: return "DuplicatePostId";
    case ErrorKind::MissingScore: return "MissingScore";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::DegenerateAxis: return "DegenerateAxis";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

/// Single exception type for every library failure.
///
/// Carries a machine-checkable kind plus the location context that callers
/// attach as the error travels outwards (input line, file path, pipeline
/// stage). `what()` renders as `stage: path:line: Kind: detail`.
class Error : public std::exception {
 public:
  Error(ErrorKind kind, std::string detail, std::optional<std::size_t> line = std::nullopt)
      : kind_(kind), detail_(std::move(detail)), line_(line) {
    render();
  }

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& stage() const noexcept { return stage_; }

  Error& with_path(std::string path) {
    if (path_.empty()) path_ = std::move(path);
    render();
    return *this;
  }

  Error& with_stage(std::string stage) {
    if (stage_.empty()) stage_ = std::move(stage);
    render();
    return *this;
  }

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  void render() {
    message_.clear();
    if (!stage_.empty()) message_ += stage_ + ": ";
    if (!path_.empty()) {
      message_ += path_;
      if (line_) message_ += ":" + std::to_string(*line_);
      message_ += ": ";
    } else if (line_) {
      message_ += "line " + std::to_string(*line_) + ": ";
    }
    message_ += to_string(kind_);
    if (!detail_.empty()) message_ += ": " + detail_;
  }

  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> line_;
  std::string path_;
  std::string stage_;
  std::string message_;
};

/// Runs `fn`, tagging any Error with the stage name and input path.
template <typename Fn>
auto run_stage(std::string_view stage, const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (!path.empty()) e.with_path(path);
    e.with_stage(std::string(stage));
    throw;
  }
}

}  // namespace sentmic
