#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops of the simulated factorization. Every kernel has
// a plain serial reference and an OpenMP version; the two must agree bitwise,
// which holds because each output element is produced by one thread with a
// fixed operation order.

namespace hrbr {

enum class ExecPolicy { Serial, Parallel };

namespace kernels {

/// dst[k] -= factor * src[k] for k < len.
struct RowUpdate {
  double* dst = nullptr;
  const double* src = nullptr;
  std::size_t len = 0;
  double factor = 0.0;
};

void apply_row_updates_serial(std::span<const RowUpdate> updates);
void apply_row_updates_parallel(std::span<const RowUpdate> updates);
void apply_row_updates(std::span<const RowUpdate> updates, ExecPolicy policy);

/// One input of a weighted block sum: a row-major rows x cols block and one
/// weight per column. Columns at or beyond `cols` contribute zero.
struct SumTerm {
  const double* data = nullptr;
  std::size_t cols = 0;
  const double* weights = nullptr;
};

/// out(i, j) = sum_t weights_t[j] * term_t(i, j), accumulated in term order.
void weighted_block_sum_serial(std::span<const SumTerm> terms, std::size_t rows,
                               std::size_t cols, double* out);
void weighted_block_sum_parallel(std::span<const SumTerm> terms, std::size_t rows,
                                 std::size_t cols, double* out);
void weighted_block_sum(std::span<const SumTerm> terms, std::size_t rows, std::size_t cols,
                        double* out, ExecPolicy policy);

/// Index of the entry with the largest magnitude, smallest index on ties.
/// NaN entries win, so a poisoned column is never silently skipped.
/// Returns values.size() for an empty span.
std::size_t argmax_abs_serial(std::span<const double> values);
std::size_t argmax_abs_parallel(std::span<const double> values);
std::size_t argmax_abs(std::span<const double> values, ExecPolicy policy);

}  // namespace kernels
}  // namespace hrbr
