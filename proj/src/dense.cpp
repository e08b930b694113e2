#include "hrbr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("entry count " + std::to_string(data_.size()) + " != " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> values) {
  return DenseMatrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

DenseMatrix DenseMatrix::random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  // The bit-to-double mapping is done by hand so that a seed produces the same
  // matrix with every standard library.
  std::mt19937_64 gen(seed);
  DenseMatrix m(rows, cols);
  for (double& v : m.data_) v = static_cast<double>(gen() >> 11) * 0x1p-53 - 0.5;
  return m;
}

double DenseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double DenseMatrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

LUFactors gepp_factor(const DenseMatrix& a) {
  if (!a.square()) throw DimensionMismatch("gepp_factor needs a square matrix");
  const std::size_t n = a.rows();
  const double pivot_tol = static_cast<double>(n) * kUnitRoundoff * a.norm_inf();

  DenseMatrix work = a;
  PermutationVector perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(work(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(work(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best >= pivot_tol) || best == 0.0) {
      throw SingularMatrix("pivot " + std::to_string(best) + " below tolerance at column " +
                           std::to_string(k));
    }
    if (piv != k) {
      std::swap_ranges(work.row(k).begin(), work.row(k).end(), work.row(piv).begin());
      std::swap(perm[k], perm[piv]);
    }
    const double d = work(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = work(i, k) / d;
      work(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) work(i, j) -= l * work(k, j);
    }
  }

  LUFactors f{std::move(perm), DenseMatrix(n, n), DenseMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) {
        f.lower(i, j) = work(i, j);
      } else {
        f.upper(i, j) = work(i, j);
      }
    }
    f.lower(i, i) = 1.0;
  }
  return f;
}

std::vector<double> back_substitute(const DenseMatrix& upper, std::span<const double> rhs) {
  const std::size_t n = upper.rows();
  if (!upper.square() || rhs.size() != n) throw DimensionMismatch("back_substitute");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= upper(ii, j) * x[j];
    x[ii] = s / upper(ii, ii);
  }
  return x;
}

DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.square() || b.rows() != a.rows()) throw DimensionMismatch("solve");
  const auto f = gepp_factor(a);
  const std::size_t n = a.rows();
  DenseMatrix x(n, b.cols());
  std::vector<double> y(n);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= f.lower(i, j) * y[j];
      y[i] = s;
    }
    const auto xc = back_substitute(f.upper, y);
    for (std::size_t i = 0; i < n; ++i) x(i, c) = xc[i];
  }
  return x;
}

double residual_check(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b) {
  if (a.cols() != x.rows() || a.rows() != b.rows() || x.cols() != b.cols()) {
    throw DimensionMismatch("residual_check");
  }
  const DenseMatrix ax = matmul(a, x);
  double r = 0.0;
  for (std::size_t i = 0; i < ax.rows(); ++i) {
    for (std::size_t c = 0; c < ax.cols(); ++c) r = std::max(r, std::abs(ax(i, c) - b(i, c)));
  }
  if (r == 0.0) return 0.0;
  const double n = static_cast<double>(a.rows());
  return r / (kUnitRoundoff * n * (a.norm_inf() * x.norm_inf() + b.norm_inf()));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul inner dims " + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()));
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix permute_rows(const DenseMatrix& a, const PermutationVector& perm) {
  if (perm.size() != a.rows()) throw DimensionMismatch("permute_rows");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    std::copy(a.row(perm[k]).begin(), a.row(perm[k]).end(), out.row(k).begin());
  }
  return out;
}

}  // namespace hrbr
