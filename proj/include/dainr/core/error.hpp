#pragma once

#include <stdexcept>
#include <string>

namespace dainr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad shape, out-of-range index, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered, divergence, or a decomposition that failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace dainr
