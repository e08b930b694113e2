#pragma once

#include <cstddef>
#include <utility>

namespace hrbr {

/// P x (Q + r) process grid. The first Q process columns hold data; the r
/// columns to their right are redundancy (checksum) columns.
struct GridSpec {
  std::size_t P = 1;
  std::size_t Q = 1;
  std::size_t mb = 1;
  std::size_t nb = 1;
  std::size_t r = 0;

  std::size_t total_cols() const { return Q + r; }
  std::size_t total_procs() const { return P * (Q + r); }
  std::size_t data_procs() const { return P * Q; }

  /// Throws InvalidArgument when any of P, Q, mb, nb is zero.
  void validate() const;
};

struct ProcCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const ProcCoord&, const ProcCoord&) = default;
};

struct LocalIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const LocalIndex&, const LocalIndex&) = default;
};

struct GlobalIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const GlobalIndex&, const GlobalIndex&) = default;
};

// Block-cyclic map of a global index onto P (or Q) processes with block size b.
// These are the per-axis halves of owner_of/local_coords.
inline std::size_t cyclic_owner(std::size_t g, std::size_t b, std::size_t procs) {
  return (g / b) % procs;
}
inline std::size_t cyclic_local(std::size_t g, std::size_t b, std::size_t procs) {
  return (g / b) / procs * b + g % b;
}
inline std::size_t cyclic_global(std::size_t proc, std::size_t l, std::size_t b,
                                 std::size_t procs) {
  return ((l / b) * procs + proc) * b + l % b;
}
/// Number of the n global indices that land on `proc`.
std::size_t cyclic_count(std::size_t n, std::size_t proc, std::size_t b, std::size_t procs);

ProcCoord owner_of(std::size_t i, std::size_t j, const GridSpec& grid, std::size_t n);
LocalIndex local_coords(std::size_t i, std::size_t j, const GridSpec& grid, std::size_t n);
GlobalIndex global_coords(const ProcCoord& proc, const LocalIndex& local, const GridSpec& grid,
                          std::size_t n);

std::size_t local_rows(std::size_t prow, const GridSpec& grid, std::size_t n);
/// Local column count of data process column q (q < Q).
std::size_t local_cols(std::size_t q, const GridSpec& grid, std::size_t n);
/// Width of a redundancy process column: the widest data column, which is column 0.
std::size_t spare_cols(const GridSpec& grid, std::size_t n);

}  // namespace hrbr
