#pragma once

#include "admmgmres/linalg/matrix.hpp"

namespace admmgmres::linalg {

/// Largest singular value, via the top eigenvalue of the smaller Gram matrix.
double spectral_norm(const Matrix& m);

double frobenius_norm(const Matrix& m);

/// 2-norm condition number of a square matrix. Throws Singular when the
/// smallest singular value is zero to working precision.
double condition_2(const Matrix& m);

/// Smallest and largest singular values.
struct SingularRange {
  double min;
  double max;
};
SingularRange singular_range(const Matrix& m);

}  // namespace admmgmres::linalg
