#pragma once

#include "gsnk/types.hpp"

namespace gsnk {

/// Singular-value summaries of a dense matrix.
struct SpectralSummary {
  double h2 = 0.0;          ///< inf ||Ax|| / ||x||; zero when rank < cols
  double sigma_max = 0.0;   ///< largest singular value
  double frob_norm = 0.0;   ///< Frobenius norm
  double row_inf_norm = 0.0;///< largest Euclidean row norm, ||A||_{2,inf}
  double sigma_min_nonzero = 0.0;  ///< smallest singular value above the rank cutoff
  Index rank = 0;
};

/// Singular values below this are treated as zero: max(r, n) * eps * sigma_max.
double rank_cutoff(Index rows, Index cols, double sigma_max);

/// Minimum-norm least-squares solution J^+ rhs, computed through a thin SVD
/// with the rank cutoff above. The result lies in the row space of J.
Vector least_norm_solve(const Matrix& J, const Vector& rhs);

/// Moore-Penrose pseudoinverse with the same truncation as least_norm_solve.
Matrix pseudoinverse(const Matrix& A);

SpectralSummary spectral_summary(const Matrix& A);

}  // namespace gsnk
