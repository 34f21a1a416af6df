#pragma once

#include <stdexcept>
#include <string>

namespace roughshe {

/// Raised when a numerical procedure (quadrature, search, time stepping)
/// cannot reach its target. Carries the best error estimate achieved.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double achieved_error = 0.0)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Input rejected before any computation (bad config, violated precondition
/// that is a user error rather than a mathematical domain error).
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& field_path, const std::string& message)
      : std::invalid_argument(field_path + ": " + message), field_path_(field_path) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace roughshe
