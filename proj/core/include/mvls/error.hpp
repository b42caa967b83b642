#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvls {

enum class ErrorCode {
  kNotConvex,
  kNotMonotone,
  kWrongArity,
  kResultNotConvex,
  kEmptyNet,
  kCyclicNetlist,
  kUnknownModule,
  kInvalidArgument,
  kInvalidNetwork,
  kInfeasibleLowerBounds,
  kNegativeResidualCycle,
  kTimingInfeasible,
  kTooLarge,
  kMalformedExpression,
  kParseError,
  kDuplicateName,
  kUnknownBlock,
  kOverflow,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; `code()` lets
// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mvls
