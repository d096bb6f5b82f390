#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "gsnk/types.hpp"

namespace gsnk {

/// A square or rectangular system f(x) = 0 with f : R^n -> R^m.
///
/// Implementations only have to provide single-row evaluation; the batch
/// forms have loop-based defaults that concrete problems override when they
/// can do better (Brown evaluates the full residual in O(n), the GLM in
/// O(nnz)). Evaluation must be pure and safe to call from several threads.
class NonlinearSystem {
 public:
  virtual ~NonlinearSystem() = default;

  /// Equation count m.
  virtual Index rows() const = 0;
  /// Unknown count n.
  virtual Index cols() const = 0;

  virtual double residual_entry(Index i, const Vector& x) const = 0;
  virtual Vector gradient_row(Index i, const Vector& x) const = 0;

  virtual double gradient_norm_sq(Index i, const Vector& x) const;
  /// Full residual f(x), length m.
  virtual Vector residual(const Vector& x) const;
  /// Squared gradient norms of every row, length m.
  virtual Vector gradient_norms_sq(const Vector& x) const;

  /// f_tau(x): residual entries stacked in the order of `subset`.
  Vector residual_block(std::span<const Index> subset, const Vector& x) const;
  /// f'_tau(x): gradient rows stacked in the order of `subset`.
  Matrix jacobian_block(std::span<const Index> subset, const Vector& x) const;
  /// Full Jacobian f'(x), m x n.
  Matrix jacobian(const Vector& x) const;

  double residual_norm_sq(const Vector& x) const { return residual(x).squaredNorm(); }

 protected:
  void check_point(const Vector& x) const;
  void check_row(Index i) const;
};

/// Solver state. When `fresh` is set, residual_sq is ||f(x)||^2 evaluated at x.
struct Iterate {
  Vector x;
  std::int64_t k = 0;
  double residual_sq = 0.0;
  bool fresh = false;
};

/// u(x) and G(x): the residual and Jacobian with every row scaled by the
/// inverse norm of its gradient.
struct NormalizedSystemView {
  Vector u;
  Matrix G;
  /// ||grad f_i(x)||^2 for every row, kept because callers need it alongside.
  Vector grad_norms_sq;
};

/// Throws DegenerateRowError naming the first row with a zero gradient.
NormalizedSystemView normalized_view(const NonlinearSystem& sys, const Vector& x);

}  // namespace gsnk
