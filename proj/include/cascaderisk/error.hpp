#pragma once

#include <stdexcept>
#include <string>

namespace cascaderisk {

// Base of every error raised by the library. The CLI maps each subclass to a
// distinct exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (edge lists, snapshots, networks).
class InputError : public Error {
 public:
  using Error::Error;
};

// A scalar parameter outside its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Balance sheets cannot be built for the given network and parameters.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// An output artifact could not be written.
class OutputError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascaderisk
