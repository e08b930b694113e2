#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hrbr/dense.hpp"

namespace hrbr {

/// One column of a transformation factor: T(row, column) = weight for each
/// listed entry, zero elsewhere in that column.
struct CodingVector {
  std::size_t column = 0;
  std::vector<std::pair<std::size_t, double>> entries;
};

/// Record of one hot replacement: logical data column `replaced_proc_col`
/// was taken over by redundancy column `coding_col`.
struct Replacement {
  std::size_t replaced_proc_col = 0;
  std::size_t failed_pcol = 0;
  std::size_t coding_col = 0;
  /// Every global column owned by the replaced process column.
  std::vector<std::size_t> global_col_blocks;
  /// Columns of T contributed by this replacement: the not-yet-eliminated
  /// columns of the replaced process column with their coding vectors.
  std::vector<CodingVector> coding_vectors;
  std::size_t at_step = 0;
  double at_time = 0.0;
};

/// Product T = T_1 T_2 ... T_k, one factor per replacement epoch. Each factor is
/// the identity except for its listed columns, so A' = A T.
class TransformationMatrix {
 public:
  explicit TransformationMatrix(std::size_t n = 0) : n_(n) {}

  std::size_t n() const { return n_; }
  const std::vector<std::vector<CodingVector>>& factors() const { return factors_; }
  bool is_identity() const { return factors_.empty(); }

  /// Appends a factor on the right. Throws InvalidArgument on repeated columns
  /// and SingularTransformation when the factor is singular.
  void append_factor(std::vector<CodingVector> columns);

  /// T y through the sparse factors, last factor first.
  std::vector<double> apply(std::span<const double> y) const;

  DenseMatrix dense() const;

 private:
  std::size_t n_;
  std::vector<std::vector<CodingVector>> factors_;
};

TransformationMatrix build_transformation(const std::vector<Replacement>& replacements,
                                          std::size_t n);

/// x = T y.
std::vector<double> recover_solution(const TransformationMatrix& t, std::span<const double> y);

}  // namespace hrbr
