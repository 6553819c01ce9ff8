#pragma once

#include <cstdint>

#include "admmgmres/linalg/matrix.hpp"
#include "admmgmres/linalg/random.hpp"

namespace testing_support {

using admmgmres::linalg::Matrix;
using admmgmres::linalg::Rng;
using admmgmres::linalg::Vector;

/// Q diag(eigs) Q^T with Haar Q and eigenvalues log-uniform in [1/sqrt(cond), sqrt(cond)].
Matrix random_spd(std::size_t n, double cond, Rng& rng);

/// Gaussian matrix shifted to be safely full rank (for rectangular tests).
Matrix random_full_rank(std::size_t rows, std::size_t cols, Rng& rng);

/// Frobenius norm of a - b.
double frob_diff(const Matrix& a, const Matrix& b);

/// ||Q^T Q - I||_max
double orthogonality_error(const Matrix& q);

}  // namespace testing_support

#include "admmgmres/problem.hpp"

namespace testing_support {

/// Random ECQP with n <= max_n, dimensions and s drawn from `rng`.
admmgmres::EcqpProblem small_problem(Rng& rng, std::size_t max_n, double s_max = 1.5);

/// Dense G = M^{-1} N and b = M^{-1} v from the assembled splitting.
struct DenseSplitting {
  Matrix G;
  Vector b;
};
DenseSplitting dense_splitting(const admmgmres::EcqpProblem& prob, double beta);

/// Saddle solution [x; z; y] mapped to the ADMM iterate [x; z; y / beta].
Vector fixed_point_dense(const admmgmres::EcqpProblem& prob, double beta);

}  // namespace testing_support
