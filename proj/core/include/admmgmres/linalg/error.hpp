#pragma once

#include <stdexcept>
#include <string>

namespace admmgmres::linalg {

/// Base class for failures of the dense kernels.
class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

class NotPositiveDefinite : public LinalgError {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : LinalgError("not positive definite (pivot " + std::to_string(pivot) +
                    ")"),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class RankDeficient : public LinalgError {
 public:
  explicit RankDeficient(std::size_t column)
      : LinalgError("rank deficient (column " + std::to_string(column) + ")"),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NotSymmetric : public LinalgError {
 public:
  explicit NotSymmetric(double max_asymmetry)
      : LinalgError("matrix not symmetric (max asymmetry " +
                    std::to_string(max_asymmetry) + ")"),
        max_asymmetry_(max_asymmetry) {}
  double max_asymmetry() const noexcept { return max_asymmetry_; }

 private:
  double max_asymmetry_;
};

class Singular : public LinalgError {
 public:
  Singular() : LinalgError("singular") {}
  explicit Singular(const std::string& what) : LinalgError("singular: " + what) {}
};

class NoConvergence : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

}  // namespace admmgmres::linalg
