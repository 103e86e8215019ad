#pragma once

#include <stdexcept>
#include <string>

namespace nrpursuit {

/// Non-finite or otherwise out-of-domain input to a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration: wrong sizes, missing fields, bad values.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what, int line = -1);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Integration produced a non-finite value.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double t, const std::string& what);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Newton-Raphson Jacobian could not be inverted.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network training produced a non-finite loss.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nrpursuit
