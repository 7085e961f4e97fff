#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regverify {

enum class ErrorCode {
  Syntax,
  Semantic,
  WriteOfInitialSymbol,
  EmptySupport,
  NotInitialState,
  MissingWindow,
  NotEnabled,
  TargetNotPopulated,
  ReplayFailure,
  NotDnf,
  CapExceeded,
  NotUninitialized,
  WrongRegisterCount,
  WindowNotContained,
  InconsistentProjections,
  CyclicCircuit,
  UndefinedWire,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorCode::Syntax, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Raised by replay when step `step_index` (0-based) cannot fire.
class NotEnabledError : public Error {
 public:
  NotEnabledError(std::size_t step_index, const std::string& reason)
      : Error(ErrorCode::NotEnabled, "step " + std::to_string(step_index) + " not enabled: " + reason),
        step_index_(step_index),
        reason_(reason) {}

  std::size_t step_index() const noexcept { return step_index_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t step_index_;
  std::string reason_;
};

}  // namespace regverify
