#pragma once

#include "gsnk/problem.hpp"

namespace gsnk {

/// Brown almost linear function, m = n:
///   f_k(x) = x_k + sum_i x_i - (n + 1)   for k < n - 1
///   f_{n-1}(x) = prod_i x_i - 1
/// The all-ones vector is a root; it is not the only one.
class BrownProblem final : public NonlinearSystem {
 public:
  /// Throws InputError for n < 2.
  explicit BrownProblem(Index n);

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }

  double residual_entry(Index i, const Vector& x) const override;
  Vector gradient_row(Index i, const Vector& x) const override;
  double gradient_norm_sq(Index i, const Vector& x) const override;
  Vector residual(const Vector& x) const override;
  Vector gradient_norms_sq(const Vector& x) const override;

  /// The starting point used throughout the experiments, 0.5 * ones.
  Vector default_start() const { return Vector::Constant(n_, 0.5); }

 private:
  Vector product_row_gradient(const Vector& x) const;

  Index n_;
};

}  // namespace gsnk
