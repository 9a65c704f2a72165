#ifndef EWAC_ERRORS_HPP
#define EWAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ewac {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent model / path / configuration input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The observed path has zero probability under the model.
class ZeroLikelihood : public Error {
 public:
  using Error::Error;
};

// A zero mask leaves the transportation polytope empty.
class InfeasibleMask : public Error {
 public:
  using Error::Error;
};

// Internal consistency check failed (should not happen for valid inputs).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ewac

#endif  // EWAC_ERRORS_HPP
