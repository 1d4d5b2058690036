#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rkl {

enum class ErrorKind {
  invalid_argument,
  unsupported_dimension,
  evaluation,
  construction,
  domain,
  divergence,
  insufficient_data,
  degenerate_kernel,
  no_convergence,
  not_in_far_field,
  insufficient_budget,
  unreliable_estimate,
  sweep_aborted,
  schema,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A sample function returned a non-finite value; carries the offending point.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, std::vector<double> point)
      : Error(ErrorKind::evaluation, message), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// A limiting sequence (truncations, refinements) failed to settle.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, std::vector<double> sequence)
      : Error(ErrorKind::no_convergence, message), sequence_(std::move(sequence)) {}

  const std::vector<double>& sequence() const noexcept { return sequence_; }

 private:
  std::vector<double> sequence_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace rkl
