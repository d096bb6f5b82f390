#include "gsnk/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <Eigen/SparseCore>

#include "gsnk/errors.hpp"

namespace gsnk {

namespace {

double to_double(std::string_view tok, std::size_t line_no, const char* what) {
  double v = 0.0;
  // from_chars rejects a leading '+', which LIBSVM labels use.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(line_no, std::string("non-numeric ") + what + " '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line_no, std::string("non-finite ") + what);
  return v;
}

Index to_index(std::string_view tok, std::size_t line_no) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(line_no, "non-numeric feature index '" + std::string(tok) + "'");
  }
  if (v < 1) throw ParseError(line_no, "feature index must be >= 1");
  return static_cast<Index>(v);
}

double coerce_label(double raw, std::size_t line_no) {
  if (raw == 1.0) return 1.0;
  if (raw == -1.0 || raw == 0.0) return -1.0;
  throw ParseError(line_no, "label is not one of -1, 0, +1");
}

}  // namespace

LibsvmRecord parse_libsvm_line(const std::string& line, std::size_t line_no) {
  std::string_view rest(line);
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);

  auto next_token = [&rest]() -> std::string_view {
    const auto start = rest.find_first_not_of(" \t");
    if (start == std::string_view::npos) {
      rest = {};
      return {};
    }
    rest.remove_prefix(start);
    const auto stop = rest.find_first_of(" \t");
    const std::string_view tok = rest.substr(0, stop);
    rest.remove_prefix(stop == std::string_view::npos ? rest.size() : stop);
    return tok;
  };

  LibsvmRecord rec;
  const std::string_view label = next_token();
  if (label.empty()) throw ParseError(line_no, "missing label");
  rec.label = coerce_label(to_double(label, line_no, "label"), line_no);

  for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
    }
    const Index idx = to_index(tok.substr(0, colon), line_no);
    const double val = to_double(tok.substr(colon + 1), line_no, "feature value");
    if (!rec.features.empty() && idx <= rec.features.back().first) {
      throw ParseError(line_no, idx == rec.features.back().first
                                    ? "duplicate feature index " + std::to_string(idx)
                                    : "feature indices not increasing at " + std::to_string(idx));
    }
    rec.features.emplace_back(idx, val);
  }
  return rec;
}

GlmData parse_libsvm(std::istream& in, std::optional<Index> d_hint) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const LibsvmRecord rec = parse_libsvm_line(line, line_no);
    const auto col = static_cast<Index>(labels.size());
    for (const auto& [idx, val] : rec.features) {
      if (val != 0.0) triplets.emplace_back(idx - 1, col, val);
      max_index = std::max(max_index, idx);
    }
    labels.push_back(rec.label);
  }
  if (in.bad()) throw InputError("read error while parsing LIBSVM input");
  if (labels.empty()) throw ParseError(line_no, "no records");

  // d may be 0 when no record has features and no hint was given.
  const Index d = std::max(max_index, d_hint.value_or(0));
  GlmData out;
  out.A.resize(d, static_cast<Index>(labels.size()));
  out.A.setFromTriplets(triplets.begin(), triplets.end());
  out.A.makeCompressed();
  out.y = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return out;
}

GlmData load_libsvm(const std::string& path, std::optional<Index> d_hint) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return parse_libsvm(in, d_hint);
}

void write_libsvm(const SparseMatrix& A, const Vector& y, std::ostream& out) {
  if (y.size() != A.cols()) throw InputError("write_libsvm: label count does not match columns");
  char buf[64];
  for (Index i = 0; i < A.cols(); ++i) {
    out << (y[i] > 0.0 ? "+1" : "-1");
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (it.value() == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << ' ' << (it.row() + 1) << ':' << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError("write_libsvm: output stream failed");
}

}  // namespace gsnk
