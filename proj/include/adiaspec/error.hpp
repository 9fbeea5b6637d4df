#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adiaspec {

enum class ErrorKind {
  invalid_input,
  convergence_failure,
  resolution_failure,
  degenerate_point,
  cut_crossing,
  coverage,
  consistency,
  path,
  stall,
  branch_selection,
  degeneracy,
  insufficient_length,
  assumption_failure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every failure carries a kind so that callers
/// (notably the CLI) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        double achieved_error = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const noexcept { return kind_; }

  /// Error level reached before giving up (convergence failures only).
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  ErrorKind kind_;
  double achieved_error_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace adiaspec
