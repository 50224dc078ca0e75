#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dscale {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters (grid sizes, config values, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A physically or numerically invalid input domain: clipped packets,
// off-support trajectory starts, support overflow on shifts.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Harmonic kernel evaluated at or past a conjugate point.
class FocalPointError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step, std::size_t index = 0)
      : Error(what), step_(step), index_(index) {}

  std::size_t step() const noexcept { return step_; }
  // Offending wave index for many-body evolutions, 0 otherwise.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t step_;
  std::size_t index_;
};

}  // namespace dscale
