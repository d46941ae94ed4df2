#pragma once

#include <stdexcept>
#include <string>

namespace gsml {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: unreadable files, malformed formats, invalid parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: domain escape, non-lengthlike segments, divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsml
