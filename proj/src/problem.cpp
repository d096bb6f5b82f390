#include "gsnk/problem.hpp"

#include <cmath>
#include <string>

#include "gsnk/errors.hpp"

namespace gsnk {

void NonlinearSystem::check_point(const Vector& x) const {
  if (x.size() != cols()) {
    throw InputError("point has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(cols()));
  }
}

void NonlinearSystem::check_row(Index i) const {
  if (i < 0 || i >= rows()) {
    throw InputError("row index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(rows()) + ")");
  }
}

double NonlinearSystem::gradient_norm_sq(Index i, const Vector& x) const {
  return gradient_row(i, x).squaredNorm();
}

Vector NonlinearSystem::residual(const Vector& x) const {
  check_point(x);
  Vector out(rows());
  for (Index i = 0; i < rows(); ++i) out[i] = residual_entry(i, x);
  return out;
}

Vector NonlinearSystem::gradient_norms_sq(const Vector& x) const {
  check_point(x);
  Vector out(rows());
  for (Index i = 0; i < rows(); ++i) out[i] = gradient_norm_sq(i, x);
  return out;
}

Vector NonlinearSystem::residual_block(std::span<const Index> subset, const Vector& x) const {
  check_point(x);
  Vector out(static_cast<Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) {
    check_row(subset[j]);
    out[static_cast<Index>(j)] = residual_entry(subset[j], x);
  }
  return out;
}

Matrix NonlinearSystem::jacobian_block(std::span<const Index> subset, const Vector& x) const {
  check_point(x);
  Matrix out(static_cast<Index>(subset.size()), cols());
  for (std::size_t j = 0; j < subset.size(); ++j) {
    check_row(subset[j]);
    out.row(static_cast<Index>(j)) = gradient_row(subset[j], x).transpose();
  }
  return out;
}

Matrix NonlinearSystem::jacobian(const Vector& x) const {
  check_point(x);
  Matrix out(rows(), cols());
  for (Index i = 0; i < rows(); ++i) out.row(i) = gradient_row(i, x).transpose();
  return out;
}

NormalizedSystemView normalized_view(const NonlinearSystem& sys, const Vector& x) {
  const Matrix J = sys.jacobian(x);
  const Vector f = sys.residual(x);
  NormalizedSystemView view{Vector(sys.rows()), Matrix(sys.rows(), sys.cols()),
                            Vector(sys.rows())};
  for (Index i = 0; i < sys.rows(); ++i) {
    const double norm_sq = J.row(i).squaredNorm();
    if (!(norm_sq > 0.0)) throw DegenerateRowError(i);
    const double norm = std::sqrt(norm_sq);
    view.u[i] = f[i] / norm;
    view.G.row(i) = J.row(i) / norm;
    view.grad_norms_sq[i] = norm_sq;
  }
  return view;
}

}  // namespace gsnk
