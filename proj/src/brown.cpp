#include "gsnk/problems/brown.hpp"

#include <string>

#include "gsnk/errors.hpp"

namespace gsnk {

BrownProblem::BrownProblem(Index n) : n_(n) {
  if (n < 2) throw InputError("Brown problem needs n >= 2, got " + std::to_string(n));
}

double BrownProblem::residual_entry(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  if (i == n_ - 1) return x.prod() - 1.0;
  return x[i] + x.sum() - static_cast<double>(n_ + 1);
}

// d/dx_j prod_i x_i = prod_{i != j} x_i, via prefix/suffix products so zeros
// in x are handled without dividing.
Vector BrownProblem::product_row_gradient(const Vector& x) const {
  Vector g(n_);
  double prefix = 1.0;
  for (Index j = 0; j < n_; ++j) {
    g[j] = prefix;
    prefix *= x[j];
  }
  double suffix = 1.0;
  for (Index j = n_ - 1; j >= 0; --j) {
    g[j] *= suffix;
    suffix *= x[j];
  }
  return g;
}

Vector BrownProblem::gradient_row(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  if (i == n_ - 1) return product_row_gradient(x);
  Vector g = Vector::Ones(n_);
  g[i] += 1.0;
  return g;
}

double BrownProblem::gradient_norm_sq(Index i, const Vector& x) const {
  check_row(i);
  check_point(x);
  if (i == n_ - 1) return product_row_gradient(x).squaredNorm();
  return static_cast<double>(n_ + 3);
}

Vector BrownProblem::residual(const Vector& x) const {
  check_point(x);
  const double shift = x.sum() - static_cast<double>(n_ + 1);
  Vector f = x.array() + shift;
  f[n_ - 1] = x.prod() - 1.0;
  return f;
}

Vector BrownProblem::gradient_norms_sq(const Vector& x) const {
  check_point(x);
  Vector g = Vector::Constant(n_, static_cast<double>(n_ + 3));
  g[n_ - 1] = product_row_gradient(x).squaredNorm();
  return g;
}

}  // namespace gsnk
