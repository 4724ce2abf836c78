#pragma once

#include <stdexcept>

namespace anomaly {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV rows, cadence, non-finite values).
class IngestError : public Error {
 public:
  using Error::Error;
};

/// The seasonal period could not be determined.
class PeriodError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Preconditions of a summary statistic or smoother were violated.
class StatError : public Error {
 public:
  using Error::Error;
};

class DecompError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a special function.
class MathError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace anomaly
