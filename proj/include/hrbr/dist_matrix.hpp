#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hrbr/dense.hpp"
#include "hrbr/grid.hpp"

namespace hrbr {

enum class ProcStatus {
  Alive,              // data process
  Failed,             // flushed; holds NaN until recovered or rebuilt
  Redundant,          // checksum process, not serving data
  ConsumedRedundant,  // former checksum process now serving a data column
};

/// Local storage of one virtual process: a row-major block plus its copy of
/// the right-hand side rows owned by the process row.
struct LocalBlock {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<double> rhs;

  LocalBlock() = default;
  LocalBlock(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0), rhs(r, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  /// Changes the column count, keeping the leading min(old, new) columns.
  void resize_cols(std::size_t new_cols);
};

/// A matrix scattered block-cyclically over a P x (Q + r) virtual grid.
///
/// Physical process columns keep their identity for the whole run; which one
/// plays logical data column q is tracked separately so that a redundancy
/// column can take over a failed data column.
class DistMatrix {
 public:
  DistMatrix() = default;
  DistMatrix(const GridSpec& grid, std::size_t n);

  const GridSpec& grid() const { return grid_; }
  std::size_t n() const { return n_; }

  LocalBlock& local(std::size_t prow, std::size_t pcol) { return locals_[index(prow, pcol)]; }
  const LocalBlock& local(std::size_t prow, std::size_t pcol) const {
    return locals_[index(prow, pcol)];
  }
  LocalBlock& local(const ProcCoord& c) { return local(c.row, c.col); }
  const LocalBlock& local(const ProcCoord& c) const { return local(c.row, c.col); }

  ProcStatus status(std::size_t prow, std::size_t pcol) const { return status_[index(prow, pcol)]; }
  ProcStatus status(const ProcCoord& c) const { return status(c.row, c.col); }
  void set_status(const ProcCoord& c, ProcStatus s) { status_[index(c.row, c.col)] = s; }
  void set_column_status(std::size_t pcol, ProcStatus s);

  /// Physical column currently serving logical data column q.
  std::size_t data_col(std::size_t q) const { return data_cols_[q]; }
  void set_data_col(std::size_t q, std::size_t pcol) { data_cols_[q] = pcol; }
  /// Logical data column served by physical column pcol, if any.
  std::optional<std::size_t> logical_col(std::size_t pcol) const;

  /// Physical columns whose processes all hold checksum data, in column order.
  std::vector<std::size_t> spare_columns() const;
  /// Column of the coding matrix a redundancy column encodes with.
  std::size_t coding_index(std::size_t pcol) const { return coding_index_[pcol]; }
  void set_coding_index(std::size_t pcol, std::size_t k) { coding_index_[pcol] = k; }

  /// ||A||_inf of the matrix that was distributed; the scale for checksum tolerances.
  double reference_norm() const { return reference_norm_; }
  void set_reference_norm(double v) { reference_norm_ = v; }

 private:
  std::size_t index(std::size_t prow, std::size_t pcol) const {
    return prow * grid_.total_cols() + pcol;
  }

  GridSpec grid_;
  std::size_t n_ = 0;
  std::vector<LocalBlock> locals_;
  std::vector<ProcStatus> status_;
  std::vector<std::size_t> data_cols_;
  std::vector<std::size_t> coding_index_;
  double reference_norm_ = 0.0;
};

/// Scatters A (and optionally b into every process's rhs copy) per the
/// block-cyclic map. Redundancy columns are allocated zeroed.
DistMatrix distribute(const DenseMatrix& a, const GridSpec& grid);
DistMatrix distribute(const DenseMatrix& a, const DenseMatrix& b, const GridSpec& grid);

/// Reassembles the active data matrix. Throws FailedProcessPresent when a
/// process serving data is Failed.
DenseMatrix gather(const DistMatrix& dist);

/// Right-hand side as seen by the active data processes (first copy in each row).
std::vector<double> gather_rhs(const DistMatrix& dist);

/// Global n x w view of one redundancy column, w = spare_cols(grid, n).
DenseMatrix gather_spare(const DistMatrix& dist, std::size_t pcol);

}  // namespace hrbr
