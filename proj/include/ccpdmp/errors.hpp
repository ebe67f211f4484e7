#pragma once

#include <stdexcept>
#include <string>

namespace ccpdmp {

/// Argument outside the operation's domain (negative draw, bad index, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A rate callback produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thinning proposal value was not strictly positive.
class InvalidProposalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The target rate exceeded its envelope by more than the tolerance.
/// Almost always means the concave-convex decomposition is wrong.
class EnvelopeViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tangent intersection fell outside its interval: the "concave" part is not concave.
class ConcavityViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive thinning loop hit its iteration cap.
class ThinningStallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reflection requested against a zero (sub-)gradient.
class DegenerateReflectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derivative bound that has no closed form for the requested parameters.
class UnsupportedBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimator input with no usable variation.
class DegenerateSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccpdmp
