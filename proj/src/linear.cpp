#include "gsnk/problems/linear.hpp"

#include <cmath>

#include <Eigen/QR>

#include "gsnk/errors.hpp"

namespace gsnk {

LinearProblem::LinearProblem(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() < 1 || A_.cols() < 1) throw InputError("linear problem needs a nonempty matrix");
  if (b_.size() != A_.rows()) throw InputError("linear problem: rhs length mismatch");
  row_norms_sq_ = A_.rowwise().squaredNorm();
}

double LinearProblem::residual_entry(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  return A_.row(i).dot(x) - b_[i];
}

Vector LinearProblem::gradient_row(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  return A_.row(i).transpose();
}

double LinearProblem::gradient_norm_sq(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  return row_norms_sq_[i];
}

Vector LinearProblem::residual(const Vector& x) const {
  check_point(x);
  // Row-wise so every entry matches residual_entry bit for bit.
  Vector f(A_.rows());
  for (Index i = 0; i < A_.rows(); ++i) f[i] = A_.row(i).dot(x) - b_[i];
  return f;
}

Vector LinearProblem::gradient_norms_sq(const Vector& x) const {
  check_point(x);
  return row_norms_sq_;
}

namespace {

Matrix random_orthonormal_columns(RngStream& rng, Index rows, Index cols) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace

LinearInstance linear_make(RngStream& rng, Index m, Index n, double cond_target) {
  if (m < 1 || n < 1) throw InputError("linear_make: m and n must be positive");
  if (!(cond_target >= 1.0)) throw InputError("linear_make: cond_target must be >= 1");
  const Index k = std::min(m, n);
  const Matrix U = random_orthonormal_columns(rng, m, k);
  const Matrix V = random_orthonormal_columns(rng, n, k);
  Vector s(k);
  for (Index i = 0; i < k; ++i) {
    const double t = k == 1 ? 0.0 : static_cast<double>(k - 1 - i) / static_cast<double>(k - 1);
    s[i] = std::pow(cond_target, t);
  }
  Matrix A = U * s.asDiagonal() * V.transpose();
  Vector x_star(n);
  for (Index i = 0; i < n; ++i) x_star[i] = rng.normal();
  Vector b(m);
  for (Index i = 0; i < m; ++i) b[i] = A.row(i).dot(x_star);
  return LinearInstance{LinearProblem(std::move(A), std::move(b)), std::move(x_star)};
}

}  // namespace gsnk
