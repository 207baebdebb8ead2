// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deformed {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. ln_phi at x <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Family parameters out of range.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// Derivative requested at a point where it is two-sided ambiguous.
class NonDifferentiableError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Quadrature of a user-supplied logarithm failed.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class NegativeWeight : public Error {
 public:
  explicit NegativeWeight(std::size_t index)
      : Error("negative weight at index " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class SumError : public Error {
 public:
  explicit SumError(double actual_sum)
      : Error("weights sum to " + std::to_string(actual_sum) + ", not 1"),
        actual_sum_(actual_sum) {}
  double actual_sum() const noexcept { return actual_sum_; }

 private:
  double actual_sum_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IdenticalPdfs : public Error {
 public:
  IdenticalPdfs() : Error("distributions are identical") {}
};

/// p - q has no entry of one sign, so the totals of p and q differ by
/// rounding and p Delta q is undefined.
class UnbalancedDifference : public RangeError {
 public:
  UnbalancedDifference()
      : RangeError("p - q is one-signed; the inputs differ only in normalisation") {}
};

class ShrinkError : public Error {
 public:
  using Error::Error;
};

/// A required term diverges because of a zero probability.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis of an inequality violated by the inputs (e.g. tv norm too big).

/// Inequality only defined for a specific family.
class FamilyError : public Error {
 public:
  using Error::Error;
};

class InfeasibleEpsilon : public Error {
 public:
  using Error::Error;
};

class ZeroProbability : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace deformed
