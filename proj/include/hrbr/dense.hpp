#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hrbr {

// Unit roundoff of IEEE binary64.
inline constexpr double kUnitRoundoff = 0x1p-53;

/// Row-major dense matrix of doubles. Vectors are n x 1 matrices.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix column(std::span<const double> values);
  /// Uniform(-0.5, 0.5) entries from a seeded 64-bit generator, HPL style.
  static DenseMatrix random(std::size_t rows, std::size_t cols, std::uint64_t seed);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Max absolute row sum.
  double norm_inf() const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// perm[k] is the original row placed at position k, so (P*A)(k, :) = A(perm[k], :).
using PermutationVector = std::vector<std::size_t>;

struct LUFactors {
  PermutationVector perm;
  DenseMatrix lower;  // unit lower triangular
  DenseMatrix upper;
};

/// Gaussian elimination with partial pivoting. Ties on pivot magnitude go to
/// the smallest row index. Throws SingularMatrix when the best pivot falls
/// below n * eps * ||A||_inf.
LUFactors gepp_factor(const DenseMatrix& a);

DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b);

/// ||A x - b||_inf / (eps * n * (||A||_inf ||x||_inf + ||b||_inf)).
double residual_check(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix permute_rows(const DenseMatrix& a, const PermutationVector& perm);

/// Solves U x = c for upper triangular U.
std::vector<double> back_substitute(const DenseMatrix& upper, std::span<const double> rhs);

}  // namespace hrbr
