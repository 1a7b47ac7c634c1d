#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridfreq {

enum class ErrorKind {
  NotConnected,
  Unbalanced,
  NonFinite,
  WrongFamily,
  Unjoinable,
  Infeasible,
  Singular,
  NotConverged,
  Parse,
  Validation,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gridfreq
