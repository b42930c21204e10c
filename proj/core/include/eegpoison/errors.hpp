#pragma once

#include <stdexcept>
#include <string>

namespace eegpoison {

enum class ErrorKind {
  Io,
  EmptyFile,
  MissingColumn,
  BadLabel,
  BadNumber,
  BadRow,
  DegenerateClass,
  LengthMismatch,
  EmptyInput,
  DimensionMismatch,
  EmptyTrainingSet,
  AllZero,
  BadConfig,
  BadFlag,
  MissingResults,
  Timeout,
  Internal,
};

const char* to_string(ErrorKind kind);

/// Exit-code buckets: 1 usage, 2 data, 3 runtime.
enum class ErrorCategory { Usage = 1, Data = 2, Runtime = 3 };

ErrorCategory category(ErrorKind kind);

/// Single exception type carrying a kind plus optional row/column context
/// (1-based data row for CSV errors, column name where it applies).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, long row = -1,
        std::string column = std::string());

  ErrorKind kind() const noexcept { return kind_; }
  long row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  long row_;
  std::string column_;
};

}  // namespace eegpoison
