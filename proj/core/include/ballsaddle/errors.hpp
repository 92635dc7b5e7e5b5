#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ballsaddle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in spaces of different dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument failed (negative radius, NaN coordinate, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An oracle was queried outside the domain it is contracted on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied projection oracle failed its idempotence audit.
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of the theorem being applied does not hold for the input.
class HypothesisViolation : public Error {
 public:
  explicit HypothesisViolation(const std::string& what, double deficit = 0.0)
      : Error(what), deficit_(deficit) {}

  /// How far the violated inequality is from holding (0 when not meaningful).
  double deficit() const noexcept { return deficit_; }

 private:
  double deficit_;
};

/// An iterative method hit its iteration cap before reaching tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

}  // namespace ballsaddle
