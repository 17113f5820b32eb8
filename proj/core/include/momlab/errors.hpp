#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace momlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the set where an operation is defined (point outside a
/// box, empty effective domain, disjoint supports, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity overflowed or is not finite.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid numeric parameter (q >= p, k = 0, grid too large, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A Field or measure violates its structural invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Operation only implemented in dimension one.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// Gibbs normalization produced zero or infinite mass.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// A field handed to a Potential fails the discrete convexity test.
class ConvexityError : public Error {
 public:
  ConvexityError(const std::string& what, std::size_t node, double violation)
      : Error(what), node_(node), violation_(violation) {}
  std::size_t node() const noexcept { return node_; }
  double violation() const noexcept { return violation_; }

 private:
  std::size_t node_;
  double violation_;
};

/// 2δf − φ is not concave. Carries the worst node and, when known, the largest
/// admissible δ found by bisection.
class ConcavityError : public Error {
 public:
  ConcavityError(const std::string& what, std::size_t node, double violation,
                 double admissible_delta = 0.0)
      : Error(what),
        node_(node),
        violation_(violation),
        admissible_delta_(admissible_delta) {}
  std::size_t node() const noexcept { return node_; }
  double violation() const noexcept { return violation_; }
  double admissible_delta() const noexcept { return admissible_delta_; }

 private:
  std::size_t node_;
  double violation_;
  double admissible_delta_;
};

/// A documented precondition failed (Prékopa condition, modulus below λ, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Target measure has Θ(μ) = 0 and no regularization: no moment-measure
/// representation exists.
class DegenerateTargetError : public Error {
 public:
  using Error::Error;
};

/// Potential is outside the curvature class D²V ≤ Λ.
class ClassMembershipError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration diverged.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what),
        line_(line),
        message_(what) {}
  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace momlab
