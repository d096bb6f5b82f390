#include <doctest.h>

#include <cmath>

#include "gsnk/errors.hpp"
#include "gsnk/linalg.hpp"
#include "gsnk/rng.hpp"
#include "oracles.hpp"

using namespace gsnk;

namespace {

Matrix random_matrix(RngStream& rng, Index r, Index c) {
  return Matrix::NullaryExpr(r, c, [&] { return rng.normal(); });
}

}  // namespace

TEST_CASE("least_norm_solve examples") {
  const Vector a = least_norm_solve(Matrix::Identity(2, 2), Vector{{1.0, -2.0}});
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-2.0));

  Matrix line(1, 2);
  line << 1, 1;
  const Vector b = least_norm_solve(line, Vector{{2.0}});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(1.0));

  Matrix dup(2, 2);
  dup << 1, 0, 1, 0;
  const Vector c = least_norm_solve(dup, Vector{{1.0, 1.0}});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(std::abs(c[1]) < 1e-15);
}

TEST_CASE("least_norm_solve rejects bad input") {
  Matrix J = Matrix::Identity(2, 2);
  J(0, 1) = std::nan("");
  CHECK_THROWS_AS(least_norm_solve(J, Vector::Ones(2)), InputError);
  CHECK_THROWS_AS(least_norm_solve(Matrix::Identity(2, 2), Vector::Ones(3)), InputError);
}

TEST_CASE("least_norm_solve projects onto the row space") {
  RngStream rng(21, streams::kHarness);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(10));
    const Index r = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const Matrix J = random_matrix(rng, r, n);
    const Vector y = Vector::NullaryExpr(n, [&] { return rng.normal(); });
    // orthogonal projector onto row(J) from a QR of J^T
    const Eigen::HouseholderQR<Matrix> qr(J.transpose());
    const Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
    const Vector proj = Q * (Q.transpose() * y);
    CHECK((least_norm_solve(J, J * y) - proj).norm() < 1e-10 * std::max(1.0, y.norm()));

    const Vector rhs = Vector::NullaryExpr(r, [&] { return rng.normal(); });
    const Vector x = least_norm_solve(J, rhs);
    CHECK((J * x - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("pseudoinverse satisfies the Penrose identities") {
  RngStream rng(22, streams::kHarness);
  Matrix A = random_matrix(rng, 5, 3) * random_matrix(rng, 3, 6);  // rank 3
  const Matrix P = pseudoinverse(A);
  CHECK((A * P * A - A).norm() < 1e-10 * A.norm());
  CHECK((P * A * P - P).norm() < 1e-10 * P.norm());
  CHECK((A * P - (A * P).transpose()).norm() < 1e-10);
  CHECK((P * A - (P * A).transpose()).norm() < 1e-10);
}

TEST_CASE("spectral_summary examples") {
  const SpectralSummary id = spectral_summary(Matrix::Identity(3, 3));
  CHECK(id.h2 == doctest::Approx(1.0));
  CHECK(id.sigma_max == doctest::Approx(1.0));
  CHECK(id.frob_norm == doctest::Approx(std::sqrt(3.0)));
  CHECK(id.row_inf_norm == doctest::Approx(1.0));
  CHECK(id.rank == 3);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  const SpectralSummary sing = spectral_summary(d);
  CHECK(sing.h2 == 0.0);
  CHECK(sing.sigma_max == doctest::Approx(3.0));
  CHECK(sing.rank == 1);
  CHECK(sing.sigma_min_nonzero == doctest::Approx(3.0));

  Matrix g(2, 2);
  g << 1, 1, 0, 1;
  const SpectralSummary gold = spectral_summary(g);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(gold.sigma_max == doctest::Approx(phi).epsilon(1e-12));
  CHECK(gold.h2 == doctest::Approx(phi - 1.0).epsilon(1e-12));
}

TEST_CASE("spectral_summary ordering on random shapes") {
  RngStream rng(23, streams::kHarness);
  for (int t = 0; t < 100; ++t) {
    const Index r = 1 + static_cast<Index>(rng.below(50));
    const Index c = 1 + static_cast<Index>(rng.below(50));
    const Matrix A = random_matrix(rng, r, c);
    const SpectralSummary s = spectral_summary(A);
    CHECK(0.0 <= s.h2);
    CHECK(s.h2 <= s.sigma_max);
    CHECK(s.sigma_max <= s.frob_norm * (1 + 1e-14));
    CHECK(s.row_inf_norm <= s.frob_norm * (1 + 1e-14));
    if (c > r) CHECK(s.h2 == 0.0);
    const oracle::Vec sv = oracle::singular_values(A);
    CHECK(s.sigma_max == doctest::Approx(sv[0]).epsilon(1e-9));
    CHECK(s.h2 == doctest::Approx(oracle::h2(A)).epsilon(1e-8));
    CHECK(s.frob_norm == doctest::Approx(A.norm()).epsilon(1e-12));
    CHECK(s.row_inf_norm == doctest::Approx(A.rowwise().norm().maxCoeff()).epsilon(1e-12));
  }
}

TEST_CASE("rank cutoff scales with shape and sigma_max") {
  CHECK(rank_cutoff(3, 5, 2.0) == doctest::Approx(5 * 2.0 * std::numeric_limits<double>::epsilon()));
  Matrix tiny = Matrix::Identity(2, 2);
  tiny(1, 1) = 1e-17;
  CHECK(spectral_summary(tiny).rank == 1);
}
