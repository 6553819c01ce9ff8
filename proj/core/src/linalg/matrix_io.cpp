#include "admmgmres/linalg/matrix_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace admmgmres::linalg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::size_t rows = 0, cols = 0;
  if (!(is >> rows >> cols)) throw LinalgError("matrix header: expected 'rows cols'");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      // strtod keeps full precision and accepts inf/nan spellings, which are
      // then rejected below.
      std::string tok;
      if (!(is >> tok)) throw LinalgError("matrix body: unexpected end of input");
      std::size_t used = 0;
      m(i, j) = std::stod(tok, &used);
      if (used != tok.size()) throw LinalgError("matrix body: bad number '" + tok + "'");
    }
  if (!all_finite(m)) throw LinalgError("matrix body: non-finite entry");
  return m;
}

void write_vector(std::ostream& os, std::span<const double> v) {
  write_matrix(os, Matrix(v.size(), 1, Vector(v.begin(), v.end())));
}

Vector read_vector(std::istream& is) {
  Matrix m = read_matrix(is);
  if (m.cols() != 1) throw LinalgError("vector block must have one column");
  return m.values();
}

}  // namespace admmgmres::linalg
