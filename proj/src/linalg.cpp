#include "gsnk/linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "gsnk/errors.hpp"

namespace gsnk {

namespace {

void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) throw InputError(std::string(what) + " contains non-finite entries");
}

}  // namespace

double rank_cutoff(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         sigma_max;
}

Vector least_norm_solve(const Matrix& J, const Vector& rhs) {
  if (rhs.size() != J.rows()) {
    throw InputError("least_norm_solve: rhs has length " + std::to_string(rhs.size()) +
                     ", expected " + std::to_string(J.rows()));
  }
  require_finite(J, "least_norm_solve: matrix");
  require_finite(rhs, "least_norm_solve: rhs");
  if (J.rows() == 0 || J.cols() == 0) return Vector::Zero(J.cols());

  // Single row: J^+ = J^T / ||J||^2, no factorization needed.
  if (J.rows() == 1) {
    const double norm_sq = J.row(0).squaredNorm();
    if (norm_sq == 0.0) return Vector::Zero(J.cols());
    return J.row(0).transpose() * (rhs[0] / norm_sq);
  }

  Eigen::BDCSVD<Matrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = rank_cutoff(J.rows(), J.cols(), s.size() > 0 ? s[0] : 0.0);
  Vector coeffs = svd.matrixU().transpose() * rhs;
  for (Index i = 0; i < s.size(); ++i) {
    coeffs[i] = (s[i] > cutoff && s[i] > 0.0) ? coeffs[i] / s[i] : 0.0;
  }
  return svd.matrixV() * coeffs;
}

Matrix pseudoinverse(const Matrix& A) {
  require_finite(A, "pseudoinverse: matrix");
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = rank_cutoff(A.rows(), A.cols(), s[0]);
  Vector inv(s.size());
  for (Index i = 0; i < s.size(); ++i) inv[i] = (s[i] > cutoff && s[i] > 0.0) ? 1.0 / s[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SpectralSummary spectral_summary(const Matrix& A) {
  if (A.size() == 0) throw InputError("spectral_summary: empty matrix");
  require_finite(A, "spectral_summary: matrix");

  Eigen::BDCSVD<Matrix> svd(A);
  const auto& s = svd.singularValues();  // descending, length min(rows, cols)
  SpectralSummary out;
  out.sigma_max = s[0];
  out.frob_norm = A.norm();
  out.row_inf_norm = A.rowwise().norm().maxCoeff();

  const double cutoff = rank_cutoff(A.rows(), A.cols(), s[0]);
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) {
      ++out.rank;
      out.sigma_min_nonzero = s[i];
    }
  }
  out.h2 = (out.rank == A.cols()) ? s[A.cols() - 1] : 0.0;
  return out;
}

}  // namespace gsnk
