#pragma once

#include <stdexcept>
#include <string>

namespace wdscreen {

// Every failure surfaced by the library derives from Error so callers (the CLI
// in particular) can map them to a diagnostic and a nonzero exit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when an iterative solver stops before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double violation, int iterations)
      : Error(what), violation_(violation), iterations_(iterations) {}

  double violation() const noexcept { return violation_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double violation_;
  int iterations_;
};

}  // namespace wdscreen
