#include "gsnk/problems/glm.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "gsnk/errors.hpp"
#include "gsnk/linalg.hpp"

namespace gsnk {

namespace {

// 1 / (1 + exp(-z)) without overflow for large |z|.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double logistic_loss_d1(double y, double t) { return -y * logistic(-y * t); }

double logistic_loss_d2(double y, double t) {
  const double z = y * t;
  return logistic(z) * logistic(-z);
}

GlmProblem::GlmProblem(SparseMatrix A, Vector y, double lambda)
    : A_(std::move(A)), y_(std::move(y)), lambda_(lambda), d_(A_.rows()), p_(A_.cols()) {
  if (p_ < 1 || d_ < 1) throw InputError("GLM needs at least one sample and one feature");
  if (y_.size() != p_) {
    throw InputError("GLM: " + std::to_string(y_.size()) + " labels for " + std::to_string(p_) +
                     " samples");
  }
  for (Index i = 0; i < p_; ++i) {
    if (y_[i] != 1.0 && y_[i] != -1.0) {
      throw InputError("GLM: label " + std::to_string(i) + " is not -1 or +1");
    }
  }
  if (!(lambda_ > 0.0)) throw InputError("GLM: lambda must be positive");
  A_.makeCompressed();
  A_rows_ = A_;
  A_rows_.makeCompressed();
  scale_ = 1.0 / (lambda_ * static_cast<double>(p_));

  linear_row_norms_sq_.resize(d_);
  for (Index j = 0; j < d_; ++j) {
    linear_row_norms_sq_[j] = scale_ * scale_ * A_rows_.row(j).squaredNorm() + 1.0;
  }
  column_norms_sq_.resize(p_);
  for (Index i = 0; i < p_; ++i) column_norms_sq_[i] = A_.col(i).squaredNorm();
}

GlmProblem::GlmProblem(GlmData data)
    : GlmProblem(std::move(data.A), std::move(data.y),
                 data.A.cols() > 0 ? 1.0 / static_cast<double>(data.A.cols()) : 1.0) {}

IndexSet GlmProblem::linear_rows() const {
  IndexSet rows(static_cast<std::size_t>(d_));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

IndexSet GlmProblem::nonlinear_rows() const {
  IndexSet rows(static_cast<std::size_t>(p_));
  std::iota(rows.begin(), rows.end(), d_);
  return rows;
}

double GlmProblem::margin(Index sample, const Vector& x) const {
  double t = 0.0;
  for (SparseMatrix::InnerIterator it(A_, sample); it; ++it) t += it.value() * x[p_ + it.row()];
  return t;
}

double GlmProblem::residual_entry(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  if (i < d_) {
    double acc = 0.0;
    for (decltype(A_rows_)::InnerIterator it(A_rows_, i); it; ++it) acc += it.value() * x[it.col()];
    return scale_ * acc - x[p_ + i];
  }
  const Index s = i - d_;
  return x[s] + logistic_loss_d1(y_[s], margin(s, x));
}

Vector GlmProblem::gradient_row(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  Vector g = Vector::Zero(p_ + d_);
  if (i < d_) {
    for (decltype(A_rows_)::InnerIterator it(A_rows_, i); it; ++it) g[it.col()] = scale_ * it.value();
    g[p_ + i] = -1.0;
    return g;
  }
  const Index s = i - d_;
  const double curvature = logistic_loss_d2(y_[s], margin(s, x));
  g[s] = 1.0;
  for (SparseMatrix::InnerIterator it(A_, s); it; ++it) g[p_ + it.row()] = curvature * it.value();
  return g;
}

double GlmProblem::gradient_norm_sq(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  if (i < d_) return linear_row_norms_sq_[i];
  const Index s = i - d_;
  const double curvature = logistic_loss_d2(y_[s], margin(s, x));
  return 1.0 + curvature * curvature * column_norms_sq_[s];
}

Vector GlmProblem::residual(const Vector& x) const {
  check_point(x);
  const auto alpha = x.head(p_);
  const auto w = x.tail(d_);
  Vector f(p_ + d_);
  f.head(d_) = scale_ * (A_ * alpha) - w;
  const Vector margins = A_.transpose() * w;
  for (Index s = 0; s < p_; ++s) f[d_ + s] = alpha[s] + logistic_loss_d1(y_[s], margins[s]);
  return f;
}

Vector GlmProblem::gradient_norms_sq(const Vector& x) const {
  check_point(x);
  Vector g(p_ + d_);
  g.head(d_) = linear_row_norms_sq_;
  const Vector margins = A_.transpose() * x.tail(d_);
  for (Index s = 0; s < p_; ++s) {
    const double c = logistic_loss_d2(y_[s], margins[s]);
    g[d_ + s] = 1.0 + c * c * column_norms_sq_[s];
  }
  return g;
}

DatasetStats dataset_stats(const SparseMatrix& A, Index p, double lambda) {
  if (A.rows() < 1 || A.cols() < 1) throw InputError("dataset_stats: empty matrix");
  if (p < 1) throw InputError("dataset_stats: p must be positive");
  const Matrix dense = Matrix(A);
  Eigen::BDCSVD<Matrix> svd(dense);
  const auto& s = svd.singularValues();

  DatasetStats out;
  out.d = A.rows();
  out.p = A.cols();
  out.sigma_max = s[0];
  out.sigma_min = s[s.size() - 1];
  out.L = s[0] * s[0] / (4.0 * static_cast<double>(p)) + lambda;

  Index nnz = 0;
  for (Index k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) nnz += it.value() != 0.0 ? 1 : 0;
  }
  out.density = static_cast<double>(nnz) / (static_cast<double>(A.rows()) * static_cast<double>(A.cols()));

  const double cutoff = rank_cutoff(A.rows(), A.cols(), s[0]);
  out.cond = (out.sigma_min > cutoff && out.sigma_min > 0.0)
                 ? out.sigma_max / out.sigma_min
                 : std::numeric_limits<double>::infinity();
  return out;
}

GlmData glm_synthetic(RngStream& rng, Index d, Index p, double flip) {
  if (d < 1 || p < 1) throw InputError("glm_synthetic: d and p must be positive");
  Vector planted(d);
  for (Index j = 0; j < d; ++j) planted[j] = rng.normal();

  Matrix dense(d, p);
  Vector y(p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < d; ++j) dense(j, i) = rng.normal();
    double label = dense.col(i).dot(planted) >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform() < flip) label = -label;
    y[i] = label;
  }
  return GlmData{dense.sparseView(), std::move(y)};
}

}  // namespace gsnk
