#pragma once

#include <stdexcept>
#include <string>

namespace trackstride {

/// Failure categories. The CLI maps each category onto a stable exit code.
enum class ErrorKind {
  Config,    ///< bad configuration or spec file
  Pipeline,  ///< the data does not support an estimate (no valid pair, too few contacts)
  Io,        ///< unreadable or malformed input files
  Argument,  ///< a precondition on a function argument was violated
};

enum class ErrorCode {
  DimensionMismatch,
  InvalidSigma,
  InvalidThresholds,
  InvalidPolygon,
  InvalidParams,
  OutOfBounds,
  EmptyInput,
  InsufficientVerticals,
  NoVanishingPoint,
  DegenerateConfiguration,
  RankDeficient,
  PointAtInfinity,
  NoValidPair,
  EmptyList,
  SchemaError,
  DuplicateFrame,
  NoIntersection,
  InsufficientContacts,
  SpecError,
  NoFrames,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace trackstride
