#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsnk/problems/glm.hpp"

namespace gsnk {

/// One parsed line: label and (1-based index, value) pairs, indices increasing.
struct LibsvmRecord {
  double label = 0.0;
  std::vector<std::pair<Index, double>> features;
};

/// Parses a single line. Labels 0/1 become -1/+1; +1/-1 pass through.
/// Throws ParseError tagged with `line_no`.
LibsvmRecord parse_libsvm_line(const std::string& line, std::size_t line_no);

/// Streams a LIBSVM file into a d x p column-sample matrix. d is the larger of
/// the largest feature index and `d_hint`. Blank lines are skipped; CRLF is
/// accepted. An input without records is a parse error.
GlmData parse_libsvm(std::istream& in, std::optional<Index> d_hint = std::nullopt);

/// Opens `path` and parses it; throws InputError when the file cannot be read.
GlmData load_libsvm(const std::string& path, std::optional<Index> d_hint = std::nullopt);

/// Writes one line per column, nonzeros only, values with 17 significant digits.
void write_libsvm(const SparseMatrix& A, const Vector& y, std::ostream& out);

}  // namespace gsnk
