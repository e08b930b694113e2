#include "hrbr/grid.hpp"

#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

void GridSpec::validate() const {
  if (P == 0 || Q == 0) {
    throw InvalidArgument("process grid " + std::to_string(P) + "x" + std::to_string(Q) +
                          " must have P, Q >= 1");
  }
  if (mb == 0 || nb == 0) throw InvalidArgument("block sizes must be >= 1");
}

std::size_t cyclic_count(std::size_t n, std::size_t proc, std::size_t b, std::size_t procs) {
  const std::size_t full_blocks = n / b;
  const std::size_t tail = n % b;
  std::size_t count = (full_blocks / procs) * b;
  const std::size_t extra = full_blocks % procs;
  if (proc < extra) {
    count += b;
  } else if (proc == extra) {
    count += tail;
  }
  return count;
}

namespace {
void check_range(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= n || j >= n) {
    throw OutOfRange("global index (" + std::to_string(i) + "," + std::to_string(j) +
                     ") outside order " + std::to_string(n));
  }
}
}  // namespace

ProcCoord owner_of(std::size_t i, std::size_t j, const GridSpec& grid, std::size_t n) {
  check_range(i, j, n);
  return {cyclic_owner(i, grid.mb, grid.P), cyclic_owner(j, grid.nb, grid.Q)};
}

LocalIndex local_coords(std::size_t i, std::size_t j, const GridSpec& grid, std::size_t n) {
  check_range(i, j, n);
  return {cyclic_local(i, grid.mb, grid.P), cyclic_local(j, grid.nb, grid.Q)};
}

GlobalIndex global_coords(const ProcCoord& proc, const LocalIndex& local, const GridSpec& grid,
                          std::size_t n) {
  if (proc.row >= grid.P || proc.col >= grid.Q) throw OutOfRange("process outside data grid");
  if (local.i >= local_rows(proc.row, grid, n) || local.j >= local_cols(proc.col, grid, n)) {
    throw OutOfRange("local index outside process allocation");
  }
  return {cyclic_global(proc.row, local.i, grid.mb, grid.P),
          cyclic_global(proc.col, local.j, grid.nb, grid.Q)};
}

std::size_t local_rows(std::size_t prow, const GridSpec& grid, std::size_t n) {
  return cyclic_count(n, prow, grid.mb, grid.P);
}

std::size_t local_cols(std::size_t q, const GridSpec& grid, std::size_t n) {
  return cyclic_count(n, q, grid.nb, grid.Q);
}

std::size_t spare_cols(const GridSpec& grid, std::size_t n) { return local_cols(0, grid, n); }

}  // namespace hrbr
