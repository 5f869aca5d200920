#pragma once

// Error types shared by every gtmc module. Each carries a stable name that
// the CLI prints on the diagnostic stream.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtmc {

class Error : public std::runtime_error {
 public:
  Error(const char* name, const std::string& what)
      : std::runtime_error(what), name_(name) {}

  const char* name() const noexcept { return name_; }

 private:
  const char* name_;
};

#define GTMC_DEFINE_ERROR(Type)                                  \
  class Type : public Error {                                    \
   public:                                                       \
    explicit Type(const std::string& what) : Error(#Type, what) {} \
  }

GTMC_DEFINE_ERROR(CapacityExceeded);
GTMC_DEFINE_ERROR(DimensionMismatch);
GTMC_DEFINE_ERROR(InsufficientUniverse);
GTMC_DEFINE_ERROR(IndexOutOfRange);
GTMC_DEFINE_ERROR(PreconditionViolated);
GTMC_DEFINE_ERROR(InconsistentOutcome);
GTMC_DEFINE_ERROR(InconsistentSystem);
GTMC_DEFINE_ERROR(DomainError);

#undef GTMC_DEFINE_ERROR

/// Malformed text input. `line` and `column` are 1-based; column 0 means
/// the whole line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("ParseError", "line " + std::to_string(line) +
                                (column ? ", column " + std::to_string(column)
                                        : std::string()) +
                                ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace gtmc
