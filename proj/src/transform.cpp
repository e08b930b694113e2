#include "hrbr/transform.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

namespace {

DenseMatrix factor_dense(std::size_t n, const std::vector<CodingVector>& columns) {
  DenseMatrix f = DenseMatrix::identity(n);
  for (const auto& cv : columns) {
    f(cv.column, cv.column) = 0.0;
    for (const auto& [row, w] : cv.entries) f(row, cv.column) = w;
  }
  return f;
}

}  // namespace

void TransformationMatrix::append_factor(std::vector<CodingVector> columns) {
  std::set<std::size_t> cols;
  for (const auto& cv : columns) {
    if (cv.column >= n_) throw OutOfRange("transformation column outside order");
    if (!cols.insert(cv.column).second) {
      throw InvalidArgument("column " + std::to_string(cv.column) + " replaced twice in one epoch");
    }
    for (const auto& e : cv.entries) {
      if (e.first >= n_) throw OutOfRange("transformation row outside order");
    }
  }

  // When no off-diagonal entry sits in a replaced row the factor is I + N with
  // N^2 = 0 on the off-diagonal part, so det is the product of the diagonal.
  bool nilpotent = true;
  double det = 1.0;
  for (const auto& cv : columns) {
    double diag = 0.0;
    for (const auto& [row, w] : cv.entries) {
      if (row == cv.column) {
        diag += w;
      } else if (cols.count(row)) {
        nilpotent = false;
      }
    }
    det *= diag;
  }
  if (nilpotent) {
    if (det == 0.0) throw SingularTransformation("replaced column has zero diagonal weight");
  } else {
    try {
      (void)gepp_factor(factor_dense(n_, columns));
    } catch (const SingularMatrix&) {
      throw SingularTransformation("transformation factor is singular");
    }
  }
  factors_.push_back(std::move(columns));
}

std::vector<double> TransformationMatrix::apply(std::span<const double> y) const {
  if (y.size() != n_) throw DimensionMismatch("transformation apply length");
  std::vector<double> cur(y.begin(), y.end());
  std::vector<double> next;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    next = cur;
    for (const auto& cv : *it) next[cv.column] -= cur[cv.column];
    for (const auto& cv : *it) {
      for (const auto& [row, w] : cv.entries) next[row] += w * cur[cv.column];
    }
    cur.swap(next);
  }
  return cur;
}

DenseMatrix TransformationMatrix::dense() const {
  DenseMatrix t = DenseMatrix::identity(n_);
  for (const auto& f : factors_) t = matmul(t, factor_dense(n_, f));
  return t;
}

TransformationMatrix build_transformation(const std::vector<Replacement>& replacements,
                                          std::size_t n) {
  TransformationMatrix t(n);
  for (const auto& rep : replacements) {
    if (!rep.coding_vectors.empty()) t.append_factor(rep.coding_vectors);
  }
  return t;
}

std::vector<double> recover_solution(const TransformationMatrix& t, std::span<const double> y) {
  return t.apply(y);
}

}  // namespace hrbr
