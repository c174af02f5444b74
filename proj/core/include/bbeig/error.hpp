#pragma once

#include <stdexcept>
#include <string>

namespace bbeig {

// Exit codes used by the command-line driver.
enum class ExitCode : int { success = 0, check_failure = 1, config_error = 2, solver_failure = 3 };

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const { return ExitCode::solver_failure; }
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::config_error; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::config_error; }
};

}  // namespace bbeig
