#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/SparseCore>

#include "gsnk/errors.hpp"
#include "gsnk/problems/glm.hpp"
#include "gsnk/rng.hpp"
#include "gsnk/solver.hpp"
#include "oracles.hpp"

using namespace gsnk;

namespace {

SparseMatrix sparse(const Matrix& dense) { return dense.sparseView(); }

GlmProblem small_glm(RngStream& rng, Index d, Index p) {
  return GlmProblem(glm_synthetic(rng, d, p));
}

}  // namespace

TEST_CASE("logistic derivatives") {
  SUBCASE("closed forms") {
    for (const double t : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
      for (const double y : {-1.0, 1.0}) {
        CHECK(logistic_loss_d1(y, t) == doctest::Approx(-y / (1.0 + std::exp(y * t))).epsilon(1e-14));
        const double e = std::exp(y * t);
        CHECK(logistic_loss_d2(y, t) == doctest::Approx(e / ((1 + e) * (1 + e))).epsilon(1e-14));
      }
    }
    CHECK(logistic_loss_d1(1.0, 0.0) == -0.5);
    CHECK(logistic_loss_d1(-1.0, 0.0) == 0.5);
    CHECK(logistic_loss_d2(1.0, 0.0) == 0.25);
  }
  SUBCASE("bounds") {
    RngStream rng(41, streams::kHarness);
    for (int k = 0; k < 1000; ++k) {
      const double t = rng.uniform(-30.0, 30.0);
      CHECK(logistic_loss_d1(1.0, t) < 0.0);
      CHECK(logistic_loss_d1(1.0, t) > -1.0);
      CHECK(logistic_loss_d1(-1.0, t) > 0.0);
      CHECK(logistic_loss_d1(-1.0, t) < 1.0);
      CHECK(logistic_loss_d2(1.0, t) > 0.0);
      CHECK(logistic_loss_d2(1.0, t) <= 0.25);
    }
  }
  SUBCASE("no overflow far out") {
    for (const double t : {-1e4, -800.0, 800.0, 1e4}) {
      CHECK(std::isfinite(logistic_loss_d1(1.0, t)));
      CHECK(std::isfinite(logistic_loss_d2(-1.0, t)));
    }
    CHECK(logistic_loss_d1(1.0, 1e4) == doctest::Approx(0.0));
    CHECK(logistic_loss_d1(1.0, -1e4) == doctest::Approx(-1.0));
  }
  SUBCASE("d1 is the derivative of the loss, d2 of d1") {
    for (const double t : {-2.0, 0.3, 1.5}) {
      for (const double y : {-1.0, 1.0}) {
        const double h = 1e-6;
        auto loss = [&](double s) { return std::log1p(std::exp(-y * s)); };
        CHECK(logistic_loss_d1(y, t) == doctest::Approx((loss(t + h) - loss(t - h)) / (2 * h)).epsilon(1e-6));
        CHECK(logistic_loss_d2(y, t) ==
              doctest::Approx((logistic_loss_d1(y, t + h) - logistic_loss_d1(y, t - h)) / (2 * h)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("GLM layout and residual at zero") {
  RngStream rng(42, streams::kProblem);
  const GlmProblem glm = small_glm(rng, 4, 9);
  CHECK(glm.rows() == 13);
  CHECK(glm.cols() == 13);
  CHECK(glm.features() == 4);
  CHECK(glm.samples() == 9);
  CHECK(glm.lambda() == doctest::Approx(1.0 / 9.0));
  CHECK(glm.linear_rows() == IndexSet{0, 1, 2, 3});
  CHECK(glm.nonlinear_rows().front() == 4);
  CHECK(glm.nonlinear_rows().back() == 12);

  const Vector f = glm.residual(Vector::Zero(13));
  for (Index j = 0; j < 4; ++j) CHECK(f[j] == 0.0);
  for (Index i = 0; i < 9; ++i) CHECK(f[4 + i] == -glm.labels()[i] / 2.0);
  CHECK(f.squaredNorm() == 9.0 / 4.0);
}

TEST_CASE("GLM rows against a dense re-implementation") {
  RngStream rng(43, streams::kProblem);
  const GlmProblem glm = small_glm(rng, 3, 7);
  const Matrix A = Matrix(glm.data());
  const Vector& y = glm.labels();
  const double s = 1.0 / (glm.lambda() * 7.0);
  for (int t = 0; t < 20; ++t) {
    const Vector x = Vector::NullaryExpr(10, [&] { return rng.uniform(-1, 1); });
    const Vector alpha = x.head(7), w = x.tail(3);
    Vector expect(10);
    expect.head(3) = s * A * alpha - w;
    for (Index i = 0; i < 7; ++i) {
      const double m = A.col(i).dot(w);
      expect[3 + i] = alpha[i] - y[i] / (1.0 + std::exp(y[i] * m));
    }
    CHECK((glm.residual(x) - expect).norm() < 1e-13);
    for (Index i = 0; i < 10; ++i) CHECK(glm.residual_entry(i, x) == doctest::Approx(expect[i]).epsilon(1e-13));
    const Vector g2 = glm.gradient_norms_sq(x);
    for (Index i = 0; i < 10; ++i)
      CHECK(g2[i] == doctest::Approx(glm.gradient_row(i, x).squaredNorm()).epsilon(1e-13));
  }
}

TEST_CASE("GLM gradients match central differences") {
  RngStream rng(44, streams::kProblem);
  const GlmProblem glm = small_glm(rng, 5, 12);
  for (int t = 0; t < 20; ++t) {
    const Vector x = Vector::NullaryExpr(17, [&] { return rng.uniform(-2, 2); });
    for (Index i = 0; i < 17; ++i) {
      const Vector fd = oracle::central_gradient([&](const Vector& z) { return glm.residual_entry(i, z); }, x);
      CHECK(oracle::rel_gap(glm.gradient_row(i, x), fd) < 1e-4);
    }
  }
}

TEST_CASE("alpha = -Phi(w) zeroes the nonlinear block") {
  Matrix A(1, 1);
  A << 2.0;
  GlmProblem glm(sparse(A), Vector{{1.0}}, 1.0);
  const Vector x{{-logistic_loss_d1(1.0, 0.0), 0.0}};
  CHECK(glm.residual_entry(1, x) == 0.0);
}

TEST_CASE("a block step on the affine rows solves them exactly") {
  RngStream rng(45, streams::kProblem);
  const GlmProblem glm = small_glm(rng, 6, 20);
  const Vector x = Vector::NullaryExpr(26, [&] { return rng.uniform(-1, 1); });
  const Vector xp = block_step(glm, x, glm.linear_rows());
  CHECK(glm.residual_block(glm.linear_rows(), xp).norm() < 1e-12);
}

TEST_CASE("GLM input validation") {
  Matrix A = Matrix::Ones(2, 3);
  CHECK_THROWS_AS(GlmProblem(sparse(A), Vector{{1.0, 0.0, -1.0}}, 0.1), InputError);
  CHECK_THROWS_AS(GlmProblem(sparse(A), Vector{{1.0, -1.0}}, 0.1), InputError);
  CHECK_THROWS_AS(GlmProblem(sparse(A), Vector{{1.0, -1.0, 1.0}}, 0.0), InputError);
  CHECK_NOTHROW(GlmProblem(sparse(A), Vector{{1.0, -1.0, 1.0}}, 0.1));
}

TEST_CASE("dataset_stats") {
  SUBCASE("identity example") {
    const DatasetStats s = dataset_stats(sparse(Matrix::Identity(2, 2)), 2, 0.5);
    CHECK(s.L == doctest::Approx(0.625));
    CHECK(s.density == doctest::Approx(0.5));
    CHECK(s.cond == doctest::Approx(1.0));
    CHECK(s.d == 2);
    CHECK(s.p == 2);
  }
  SUBCASE("scaling by c multiplies L - lambda by c^2") {
    RngStream rng(46, streams::kProblem);
    const GlmData data = glm_synthetic(rng, 5, 30);
    const DatasetStats a = dataset_stats(data.A, 30, 0.1);
    const DatasetStats b = dataset_stats(SparseMatrix(3.0 * data.A), 30, 0.1);
    CHECK(b.L - 0.1 == doctest::Approx(9.0 * (a.L - 0.1)).epsilon(1e-12));
    CHECK(a.L >= 0.1);
    CHECK(a.density > 0.0);
    CHECK(a.density <= 1.0);
    CHECK(a.cond >= 1.0);
    const oracle::Vec sv = oracle::singular_values(Matrix(data.A));
    CHECK(a.L == doctest::Approx(sv[0] * sv[0] / 120.0 + 0.1).epsilon(1e-10));
  }
  SUBCASE("rank-deficient data reports infinite condition") {
    Matrix A = Matrix::Zero(3, 4);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    const DatasetStats s = dataset_stats(sparse(A), 4, 0.25);
    CHECK(std::isinf(s.cond));
    CHECK(s.density == doctest::Approx(2.0 / 12.0));
  }
}

TEST_CASE("glm_synthetic") {
  RngStream a(47, streams::kProblem), b(47, streams::kProblem);
  const GlmData x = glm_synthetic(a, 10, 200);
  const GlmData y = glm_synthetic(b, 10, 200);
  CHECK(x.A.rows() == 10);
  CHECK(x.A.cols() == 200);
  CHECK(Matrix(x.A) == Matrix(y.A));
  CHECK(x.y == y.y);
  int pos = 0;
  for (Index i = 0; i < 200; ++i) {
    CHECK((x.y[i] == 1.0 || x.y[i] == -1.0));
    pos += x.y[i] > 0;
  }
  CHECK(pos > 40);
  CHECK(pos < 160);
}
