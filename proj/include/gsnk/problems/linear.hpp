#pragma once

#include "gsnk/problem.hpp"
#include "gsnk/rng.hpp"

namespace gsnk {

/// f(x) = A x - b. The cone condition holds with eta = 0.
class LinearProblem final : public NonlinearSystem {
 public:
  LinearProblem(Matrix A, Vector b);

  Index rows() const override { return A_.rows(); }
  Index cols() const override { return A_.cols(); }

  double residual_entry(Index i, const Vector& x) const override;
  Vector gradient_row(Index i, const Vector& x) const override;
  double gradient_norm_sq(Index i, const Vector& x) const override;
  Vector residual(const Vector& x) const override;
  Vector gradient_norms_sq(const Vector& x) const override;

  const Matrix& matrix() const { return A_; }
  const Vector& rhs() const { return b_; }

 private:
  Matrix A_;
  Vector b_;
  Vector row_norms_sq_;
};

struct LinearInstance {
  LinearProblem problem;
  Vector x_star;
};

/// Consistent system with A = U diag(s) V^T, U and V random with orthonormal
/// columns and s geometrically spaced from cond_target down to 1, and
/// b = A x_star for a Gaussian x_star.
LinearInstance linear_make(RngStream& rng, Index m, Index n, double cond_target);

}  // namespace gsnk
