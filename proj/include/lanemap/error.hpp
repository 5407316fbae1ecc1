#pragma once

#include <stdexcept>
#include <string>

namespace lanemap {

enum class ErrorKind {
  kInputDomain,
  kOutOfTile,
  kParse,
  kDegenerateWindow,
  kDegenerateFit,
  kUndefinedMetric,
  kDimensionMismatch,
  kConfig,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported as lanemap::Error; kind() lets callers
// branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the pipeline orchestrator; wraps the failing stage and subject.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string subject, const Error& cause)
      : Error(cause.kind(), "stage '" + stage + "' failed for '" + subject +
                                "': " + cause.what()),
        stage_(std::move(stage)),
        subject_(std::move(subject)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string stage_;
  std::string subject_;
};

}  // namespace lanemap
