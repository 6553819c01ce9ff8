#include "admmgmres/linalg/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "admmgmres/linalg/eigen.hpp"

namespace admmgmres::linalg {
namespace {

Matrix smaller_gram(const Matrix& m) {
  return m.rows() >= m.cols() ? mul_tn(m, m) : mul_nt(m, m);
}

}  // namespace

SingularRange singular_range(const Matrix& m) {
  if (m.empty()) return {0.0, 0.0};
  const auto eig = sym_eig(smaller_gram(m));
  const double lo = std::max(eig.values.front(), 0.0);
  const double hi = std::max(eig.values.back(), 0.0);
  return {std::sqrt(lo), std::sqrt(hi)};
}

double spectral_norm(const Matrix& m) { return singular_range(m).max; }

double frobenius_norm(const Matrix& m) {
  return norm2(std::span<const double>(m.values()));
}

double condition_2(const Matrix& m) {
  if (!m.is_square()) throw DimensionError("condition_2: matrix not square");
  const auto eig = sym_eig(mul_tn(m, m));
  const double hi = eig.values.back();
  const double lo = eig.values.front();
  // The Gram eigenvalue floor is ~ n * eps * ||M||^2; below that the matrix is
  // numerically singular.
  const double floor = static_cast<double>(m.rows()) *
                       std::numeric_limits<double>::epsilon() * hi;
  if (!(hi > 0.0) || lo <= floor) throw Singular("condition_2");
  return std::sqrt(hi / lo);
}

}  // namespace admmgmres::linalg
