#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssrchain {

/// Base class for every error raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation was violated.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Detuning at the 1/Δ pole of the bare qubit matrix.
class SingularDetuning : public Error {
 public:
  SingularDetuning() : Error("singular detuning: delta must be nonzero") {}
};

/// (T^N)_11 vanished on the real axis, so t = 1/(T^N)_11 does not exist.
class OnResonancePole : public Error {
 public:
  OnResonancePole() : Error("on-resonance pole: (T^N)_11 = 0 at a real detuning") {}
};

/// The contour passed through (or numerically onto) a zero after all jitter retries.
class BoundaryDegeneracy : public Error {
 public:
  using Error::Error;
};

class RefinementFailure : public Error {
 public:
  RefinementFailure(std::complex<double> best, double residual)
      : Error("refinement failed to converge"), best_(best), residual_(residual) {}

  std::complex<double> best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::complex<double> best_;
  double residual_;
};

/// No nonzero pole inside the search window.
class WindowExhausted : public Error {
 public:
  using Error::Error;
};

/// The maximization bracket does not enclose a single interior maximum.
class BracketError : public Error {
 public:
  using Error::Error;
};

class ContinuationBreakdown : public Error {
 public:
  /// `partial` holds (separation, delta) for every point reached before the breakdown.
  ContinuationBreakdown(std::string what, std::vector<std::pair<double, std::complex<double>>> partial)
      : Error(std::move(what)), partial_(std::move(partial)) {}

  const std::vector<std::pair<double, std::complex<double>>>& partial_path() const { return partial_; }

 private:
  std::vector<std::pair<double, std::complex<double>>> partial_;
};

}  // namespace ssrchain
