#include "admmgmres/linalg/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "admmgmres/linalg/decompositions.hpp"

namespace admmgmres::linalg {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return engine_();  // full 64-bit range
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return lo + v % span;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector Rng::gaussian_vector(std::size_t n) {
  Vector v(n);
  for (auto& x : v) x = gaussian();
  return v;
}

Matrix Rng::gaussian_matrix(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto& x : m.row(i)) x = gaussian();
  return m;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix haar_orthogonal(std::size_t dim, Rng& rng) {
  auto [q, r] = qr(rng.gaussian_matrix(dim, dim), /*require_full_rank=*/false);
  for (std::size_t j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0)
      for (std::size_t i = 0; i < dim; ++i) q(i, j) = -q(i, j);
  }
  return q;
}

}  // namespace admmgmres::linalg
