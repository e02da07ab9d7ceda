#pragma once

#include <stdexcept>
#include <string>

namespace maldens {

enum class ErrorKind {
  invalid_argument,
  numerical,         // factorization failure, blow-up, non-finite values
  model_violation,   // a stated hypothesis (c, M bounds, G != 0) was breached
  degenerate_data,   // e.g. zero-spread samples
  regression_failure,
  config,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit code the CLI uses for an error of this kind.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorKind::invalid_argument, w) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, w) {}
};
struct ModelViolation : Error {
  explicit ModelViolation(const std::string& w) : Error(ErrorKind::model_violation, w) {}
};
struct DegenerateData : Error {
  explicit DegenerateData(const std::string& w) : Error(ErrorKind::degenerate_data, w) {}
};
struct RegressionFailure : Error {
  explicit RegressionFailure(const std::string& w) : Error(ErrorKind::regression_failure, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

}  // namespace maldens
