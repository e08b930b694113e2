#include "hrbr/dist_matrix.hpp"

#include <algorithm>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

void LocalBlock::resize_cols(std::size_t new_cols) {
  if (new_cols == cols) return;
  std::vector<double> next(rows * new_cols, 0.0);
  const std::size_t keep = std::min(cols, new_cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy_n(data.begin() + i * cols, keep, next.begin() + i * new_cols);
  }
  data = std::move(next);
  cols = new_cols;
}

DistMatrix::DistMatrix(const GridSpec& grid, std::size_t n) : grid_(grid), n_(n) {
  grid_.validate();
  const std::size_t cols = grid_.total_cols();
  locals_.resize(grid_.total_procs());
  status_.resize(grid_.total_procs());
  coding_index_.assign(cols, 0);
  for (std::size_t p = 0; p < grid_.P; ++p) {
    const std::size_t rows = local_rows(p, grid_, n_);
    for (std::size_t c = 0; c < cols; ++c) {
      const bool data = c < grid_.Q;
      locals_[index(p, c)] = LocalBlock(rows, data ? local_cols(c, grid_, n_) : spare_cols(grid_, n_));
      status_[index(p, c)] = data ? ProcStatus::Alive : ProcStatus::Redundant;
    }
  }
  data_cols_.resize(grid_.Q);
  for (std::size_t q = 0; q < grid_.Q; ++q) data_cols_[q] = q;
  for (std::size_t k = 0; k < grid_.r; ++k) coding_index_[grid_.Q + k] = k;
}

void DistMatrix::set_column_status(std::size_t pcol, ProcStatus s) {
  for (std::size_t p = 0; p < grid_.P; ++p) status_[index(p, pcol)] = s;
}

std::optional<std::size_t> DistMatrix::logical_col(std::size_t pcol) const {
  for (std::size_t q = 0; q < data_cols_.size(); ++q) {
    if (data_cols_[q] == pcol) return q;
  }
  return std::nullopt;
}

std::vector<std::size_t> DistMatrix::spare_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < grid_.total_cols(); ++c) {
    bool all = true;
    for (std::size_t p = 0; p < grid_.P && all; ++p) all = status(p, c) == ProcStatus::Redundant;
    if (all) out.push_back(c);
  }
  return out;
}

DistMatrix distribute(const DenseMatrix& a, const GridSpec& grid) {
  if (!a.square()) throw DimensionMismatch("distribute needs a square matrix");
  const std::size_t n = a.rows();
  DistMatrix dist(grid, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = cyclic_owner(i, grid.mb, grid.P);
    const std::size_t il = cyclic_local(i, grid.mb, grid.P);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t q = cyclic_owner(j, grid.nb, grid.Q);
      dist.local(p, q).at(il, cyclic_local(j, grid.nb, grid.Q)) = a(i, j);
    }
  }
  dist.set_reference_norm(a.norm_inf());
  return dist;
}

DistMatrix distribute(const DenseMatrix& a, const DenseMatrix& b, const GridSpec& grid) {
  if (b.rows() != a.rows() || b.cols() != 1) throw DimensionMismatch("rhs must be n x 1");
  DistMatrix dist = distribute(a, grid);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::size_t p = cyclic_owner(i, grid.mb, grid.P);
    const std::size_t il = cyclic_local(i, grid.mb, grid.P);
    for (std::size_t c = 0; c < grid.total_cols(); ++c) dist.local(p, c).rhs[il] = b(i, 0);
  }
  return dist;
}

namespace {
void require_alive_data(const DistMatrix& dist) {
  const auto& g = dist.grid();
  for (std::size_t q = 0; q < g.Q; ++q) {
    for (std::size_t p = 0; p < g.P; ++p) {
      if (dist.status(p, dist.data_col(q)) == ProcStatus::Failed) {
        throw FailedProcessPresent("process (" + std::to_string(p) + "," +
                                   std::to_string(dist.data_col(q)) + ") is failed");
      }
    }
  }
}
}  // namespace

DenseMatrix gather(const DistMatrix& dist) {
  require_alive_data(dist);
  const auto& g = dist.grid();
  const std::size_t n = dist.n();
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = cyclic_owner(i, g.mb, g.P);
    const std::size_t il = cyclic_local(i, g.mb, g.P);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t q = cyclic_owner(j, g.nb, g.Q);
      a(i, j) = dist.local(p, dist.data_col(q)).at(il, cyclic_local(j, g.nb, g.Q));
    }
  }
  return a;
}

std::vector<double> gather_rhs(const DistMatrix& dist) {
  require_alive_data(dist);
  const auto& g = dist.grid();
  std::vector<double> b(dist.n());
  for (std::size_t i = 0; i < dist.n(); ++i) {
    const std::size_t p = cyclic_owner(i, g.mb, g.P);
    b[i] = dist.local(p, dist.data_col(0)).rhs[cyclic_local(i, g.mb, g.P)];
  }
  return b;
}

DenseMatrix gather_spare(const DistMatrix& dist, std::size_t pcol) {
  const auto& g = dist.grid();
  const std::size_t w = spare_cols(g, dist.n());
  DenseMatrix out(dist.n(), w);
  for (std::size_t i = 0; i < dist.n(); ++i) {
    const auto& blk = dist.local(cyclic_owner(i, g.mb, g.P), pcol);
    const std::size_t il = cyclic_local(i, g.mb, g.P);
    for (std::size_t jl = 0; jl < std::min(w, blk.cols); ++jl) out(i, jl) = blk.at(il, jl);
  }
  return out;
}

}  // namespace hrbr
