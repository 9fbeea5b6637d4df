#include "adiaspec/error.hpp"

namespace adiaspec {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::convergence_failure: return "convergence-failure";
    case ErrorKind::resolution_failure: return "resolution-failure";
    case ErrorKind::degenerate_point: return "degenerate-point";
    case ErrorKind::cut_crossing: return "cut-crossing";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::path: return "path";
    case ErrorKind::stall: return "stall";
    case ErrorKind::branch_selection: return "branch-selection";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::insufficient_length: return "insufficient-length";
    case ErrorKind::assumption_failure: return "assumption-failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double achieved_error)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      achieved_error_(achieved_error) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace adiaspec
