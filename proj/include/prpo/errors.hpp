#ifndef PRPO_ERRORS_HPP
#define PRPO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prpo {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed records, schema violations, out-of-range values.
// CLI maps these to exit code 1.
struct DataError : Error {
  using Error::Error;
};

// Environment trouble: missing files, unreachable services.
// CLI maps these to exit code 2.
struct EnvError : Error {
  using Error::Error;
};

struct EmptyTranscript : DataError {
  EmptyTranscript() : DataError("transcript is all whitespace") {}
};

struct DomainError : DataError {
  using DataError::DataError;
};

struct ShapeMismatch : DataError {
  using DataError::DataError;
};

struct IndexError : DataError {
  using DataError::DataError;
};

struct ProviderFailure : EnvError {
  using EnvError::EnvError;
};

struct FileError : EnvError {
  using EnvError::EnvError;
};

struct MalformedJson : DataError {
  using DataError::DataError;
};

struct MalformedJsonl : DataError {
  MalformedJsonl(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ": malformed record at line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

struct MissingScores : DataError {
  using DataError::DataError;
};

struct InvalidScore : DataError {
  using DataError::DataError;
};

struct MissingFinalAnswer : DataError {
  using DataError::DataError;
};

struct SchemaViolation : DataError {
  using DataError::DataError;
};

struct GroupBudgetExceeded : DataError {
  using DataError::DataError;
};

struct UnmappedFeature : DataError {
  using DataError::DataError;
};

struct ArityError : DataError {
  using DataError::DataError;
};

struct EmptyCounts : DataError {
  EmptyCounts() : DataError("confusion counts are all zero") {}
};

struct ScoreOutOfRange : DataError {
  using DataError::DataError;
};

struct MissingField : DataError {
  using DataError::DataError;
};

struct ConfigError : DataError {
  ConfigError(const std::string& field, const std::string& what)
      : DataError("config field '" + field + "': " + what), field_name(field) {}
  std::string field_name;
};

}  // namespace prpo

#endif
