#pragma once

#include <optional>
#include <vector>

#include "admmgmres/linalg/matrix.hpp"

namespace admmgmres::linalg {

/// Eigenvalues of a general real matrix, with optional unit-norm eigenvector
/// columns. Complex eigenvalues come in exactly conjugate adjacent pairs
/// (value k has positive imaginary part, value k+1 is its conjugate).
struct EigenPairs {
  std::vector<Complex> values;
  std::optional<ComplexMatrix> vectors;
};

/// Eigen-decomposition M = V diag(values) V^T of a symmetric matrix.
/// Values ascend; V is orthogonal.
struct SymmetricEigenPairs {
  Vector values;
  Matrix vectors;

  Matrix reconstruct() const;
};

/// Householder tridiagonalization followed by implicit QL iteration.
/// Throws NotSymmetric if the input fails the repo symmetry tolerance.
SymmetricEigenPairs sym_eig(const Matrix& m);

/// Hessenberg reduction followed by Francis double-shift QR iteration.
/// Throws NoConvergence if the QR sweeps stall.
EigenPairs gen_eig(const Matrix& m, bool want_vectors);

}  // namespace admmgmres::linalg
