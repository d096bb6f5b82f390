#pragma once

#include <Eigen/SparseCore>

#include "gsnk/problem.hpp"
#include "gsnk/rng.hpp"

namespace gsnk {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// A labelled sample matrix: column i of `A` (d x p) is sample a_i, y_i in {-1, +1}.
struct GlmData {
  SparseMatrix A;
  Vector y;
};

/// phi_i'(t) for the logistic loss ln(1 + exp(-y t)): -y / (1 + exp(y t)).
double logistic_loss_d1(double y, double t);
/// phi_i''(t) = exp(y t) / (1 + exp(y t))^2, in (0, 1/4].
double logistic_loss_d2(double y, double t);

/// Regularized logistic regression rewritten as a square system over
/// x = [alpha; w] (alpha in R^p first, then w in R^d):
///
///   rows 0..d-1       : (1 / (lambda p)) A alpha - w          (affine)
///   rows d..d+p-1     : alpha_i + phi_i'(a_i^T w)
class GlmProblem final : public NonlinearSystem {
 public:
  /// Throws InputError on labels outside {-1, +1}, lambda <= 0 or size mismatch.
  GlmProblem(SparseMatrix A, Vector y, double lambda);
  /// lambda defaults to 1 / p.
  explicit GlmProblem(GlmData data);

  Index rows() const override { return p_ + d_; }
  Index cols() const override { return p_ + d_; }

  double residual_entry(Index i, const Vector& x) const override;
  Vector gradient_row(Index i, const Vector& x) const override;
  double gradient_norm_sq(Index i, const Vector& x) const override;
  Vector residual(const Vector& x) const override;
  Vector gradient_norms_sq(const Vector& x) const override;

  Index features() const { return d_; }  ///< d
  Index samples() const { return p_; }   ///< p
  double lambda() const { return lambda_; }
  const SparseMatrix& data() const { return A_; }
  const Vector& labels() const { return y_; }

  IndexSet linear_rows() const;     ///< [0, d)
  IndexSet nonlinear_rows() const;  ///< [d, d + p)

 private:
  double margin(Index sample, const Vector& x) const;  // a_i^T w

  SparseMatrix A_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_rows_;
  Vector y_;
  double lambda_;
  Index d_;
  Index p_;
  double scale_;  // 1 / (lambda p)
  Vector linear_row_norms_sq_;
  Vector column_norms_sq_;
};

struct DatasetStats {
  Index d = 0;
  Index p = 0;
  double L = 0.0;        ///< lambda_max(A A^T) / (4p) + lambda
  double density = 0.0;  ///< nnz / (d p)
  double cond = 0.0;     ///< sigma_max / sigma_min, +inf below the rank cutoff
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

DatasetStats dataset_stats(const SparseMatrix& A, Index p, double lambda);

/// Gaussian samples labelled by a planted weight vector, with each label
/// flipped independently with probability `flip`.
GlmData glm_synthetic(RngStream& rng, Index d, Index p, double flip = 0.1);

}  // namespace gsnk
