#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "admmgmres/linalg/matrix.hpp"

namespace admmgmres::linalg {

/// Seeded generator used for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform doubles take the top 53 bits; Gaussians use the
/// Box-Muller transform (both outputs consumed in order). Standard library
/// distributions are avoided because their algorithms are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on the closed range [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double gaussian();
  /// exp(s * N(0, 1)).
  double lognormal(double s) { return std::exp(s * gaussian()); }

  Vector gaussian_vector(std::size_t n);
  Matrix gaussian_matrix(std::size_t rows, std::size_t cols);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; derives independent per-instance seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the sign
/// of each R diagonal entry folded into Q.
Matrix haar_orthogonal(std::size_t dim, Rng& rng);

}  // namespace admmgmres::linalg
