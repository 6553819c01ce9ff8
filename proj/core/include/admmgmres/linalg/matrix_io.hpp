#pragma once

#include <iosfwd>
#include <string>

#include "admmgmres/linalg/matrix.hpp"

namespace admmgmres::linalg {

/// Text format: a header line "rows cols", then one line per row of
/// whitespace-separated entries in %.16e (17 significant digits), which
/// round-trips every finite double exactly.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

/// Vectors are written as a rows x 1 matrix.
void write_vector(std::ostream& os, std::span<const double> v);
Vector read_vector(std::istream& is);

/// One double formatted with 17 significant digits.
std::string format_double(double v);

}  // namespace admmgmres::linalg
