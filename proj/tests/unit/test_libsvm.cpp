#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gsnk/errors.hpp"
#include "gsnk/libsvm.hpp"
#include "gsnk/rng.hpp"

using namespace gsnk;

namespace {

GlmData parse(const std::string& text, std::optional<Index> hint = std::nullopt) {
  std::istringstream in(text);
  return parse_libsvm(in, hint);
}

std::size_t error_line(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("single records") {
  const GlmData a = parse("+1 1:0.5 3:-2\n", 3);
  REQUIRE(a.A.rows() == 3);
  REQUIRE(a.A.cols() == 1);
  CHECK(a.y[0] == 1.0);
  CHECK(a.A.coeff(0, 0) == 0.5);
  CHECK(a.A.coeff(1, 0) == 0.0);
  CHECK(a.A.coeff(2, 0) == -2.0);

  const GlmData b = parse("-1\n");
  CHECK(b.y[0] == -1.0);
  CHECK(b.A.cols() == 1);
  CHECK(b.A.nonZeros() == 0);

  const LibsvmRecord r = parse_libsvm_line("0 2:1e-3 10:4", 5);
  CHECK(r.label == -1.0);
  REQUIRE(r.features.size() == 2);
  CHECK(r.features[1].first == 10);
  CHECK(r.features[1].second == 4.0);
}

TEST_CASE("malformed input") {
  CHECK(error_line("1 2:1 2:3\n") == 1);
  CHECK(error_line("1 1:1\n-1 3:1 2:1\n") == 2);
  CHECK(error_line("1 1:abc\n") == 1);
  CHECK(error_line("1 x:1\n") == 1);
  CHECK(error_line("1 0:1\n") == 1);
  CHECK(error_line("2 1:1\n") == 1);
  CHECK(error_line("") == 0);  // not a ParseError of a line: checked below
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("\n\n"), ParseError);
  try {
    (void)parse("1 2:1 2:3\n");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("labels, blank lines and CRLF") {
  const GlmData d = parse("1 1:1\r\n\r\n0 2:1\r\n-1 1:2\n+1\n");
  REQUIRE(d.y.size() == 4);
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == -1.0);
  CHECK(d.y[2] == -1.0);
  CHECK(d.y[3] == 1.0);
  CHECK(d.A.rows() == 2);
  CHECK(d.A.coeff(1, 1) == 1.0);
}

TEST_CASE("d is the larger of the max index and the hint") {
  CHECK(parse("1 4:1\n", 2).A.rows() == 4);
  CHECK(parse("1 4:1\n", 9).A.rows() == 9);
}

TEST_CASE("round trip is bit-identical") {
  RngStream rng(51, streams::kHarness);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(12));
    const Index p = 1 + static_cast<Index>(rng.below(15));
    Matrix dense = Matrix::Zero(d, p);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < p; ++j)
        if (rng.uniform() < 0.4) dense(i, j) = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    Vector y(p);
    for (Index j = 0; j < p; ++j) y[j] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const SparseMatrix A = dense.sparseView();
    std::ostringstream out;
    write_libsvm(A, y, out);
    const GlmData back = parse(out.str(), d);
    CHECK(back.y == y);
    CHECK(Matrix(back.A) == dense);
  }
}

TEST_CASE("zero column writes a bare label") {
  Matrix dense = Matrix::Zero(2, 2);
  dense(1, 0) = 1.5;
  std::ostringstream out;
  write_libsvm(dense.sparseView(), Vector{{1.0, -1.0}}, out);
  std::istringstream lines(out.str());
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first == "+1 2:1.5");
  CHECK(second == "-1");
}

TEST_CASE("committed fixture") {
  const std::string path = std::string(GSNK_TEST_DATA_DIR) + "/mini.libsvm";
  const GlmData d = load_libsvm(path);
  CHECK(d.A.cols() <= 50);
  CHECK(d.A.cols() > 0);
  CHECK(d.A.rows() == 13);
  const DatasetStats before = dataset_stats(d.A, d.A.cols(), 1.0 / static_cast<double>(d.A.cols()));

  const auto tmp = std::filesystem::temp_directory_path() / "gsnk_mini_roundtrip.libsvm";
  {
    std::ofstream out(tmp);
    write_libsvm(d.A, d.y, out);
  }
  const GlmData again = load_libsvm(tmp.string(), d.A.rows());
  std::filesystem::remove(tmp);
  const DatasetStats after = dataset_stats(again.A, again.A.cols(), 1.0 / static_cast<double>(again.A.cols()));
  CHECK(after.density == before.density);
  CHECK(after.L == before.L);
  CHECK(Matrix(again.A) == Matrix(d.A));
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_libsvm("/nonexistent/gsnk/heart"), InputError);
}
