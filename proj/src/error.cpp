#include "maldens/error.hpp"

namespace maldens {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::numerical: return "numerical-error";
    case ErrorKind::model_violation: return "model-violation";
    case ErrorKind::degenerate_data: return "degenerate-data";
    case ErrorKind::regression_failure: return "regression-failure";
    case ErrorKind::config: return "config-error";
    case ErrorKind::io: return "io-error";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::model_violation: return 3;
    case ErrorKind::numerical:
    case ErrorKind::degenerate_data:
    case ErrorKind::regression_failure: return 4;
    case ErrorKind::invalid_argument:
    case ErrorKind::config:
    case ErrorKind::io: return 5;
  }
  return 5;
}

}  // namespace maldens
