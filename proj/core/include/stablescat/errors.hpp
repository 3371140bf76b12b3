#pragma once

#include <stdexcept>
#include <string>

namespace stablescat {

/// Parameter outside the admissible domain (e.g. d <= alpha).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical integration did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel evaluated on its singular set (x == y for the Riesz kernel).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative method exhausted its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling measure has zero total mass.
class DegenerateMeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extrapolation of a time-average sequence failed.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration problem, carrying the offending key and line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(key), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!key.empty()) s += "[" + key + "] ";
    return s + what;
  }

  std::string key_;
  int line_;
};

}  // namespace stablescat
