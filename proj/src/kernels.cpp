#include "hrbr/kernels.hpp"

#include <cmath>
#include <cstdint>

#include <omp.h>

namespace hrbr::kernels {

namespace {

inline void update_one(const RowUpdate& u) {
  const double f = u.factor;
  double* __restrict d = u.dst;
  const double* __restrict s = u.src;
  for (std::size_t k = 0; k < u.len; ++k) d[k] -= f * s[k];
}

inline void sum_row(std::span<const SumTerm> terms, std::size_t i, std::size_t cols, double* out) {
  double* o = out + i * cols;
  for (std::size_t j = 0; j < cols; ++j) o[j] = 0.0;
  for (const auto& t : terms) {
    const double* src = t.data + i * t.cols;
    const std::size_t w = t.cols < cols ? t.cols : cols;
    for (std::size_t j = 0; j < w; ++j) o[j] += t.weights[j] * src[j];
  }
}

// Magnitude ordering where NaN compares greater than every number.
inline bool beats(double a, double b) {
  if (std::isnan(a)) return !std::isnan(b);
  if (std::isnan(b)) return false;
  return std::abs(a) > std::abs(b);
}

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 14;

}  // namespace

void apply_row_updates_serial(std::span<const RowUpdate> updates) {
  for (const auto& u : updates) update_one(u);
}

void apply_row_updates_parallel(std::span<const RowUpdate> updates) {
  const auto count = static_cast<std::int64_t>(updates.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < count; ++t) update_one(updates[static_cast<std::size_t>(t)]);
}

void apply_row_updates(std::span<const RowUpdate> updates, ExecPolicy policy) {
  if (policy == ExecPolicy::Serial || updates.size() < 2) {
    apply_row_updates_serial(updates);
    return;
  }
  std::size_t work = 0;
  for (const auto& u : updates) work += u.len;
  if (work < kParallelThreshold || omp_get_max_threads() == 1) {
    apply_row_updates_serial(updates);
  } else {
    apply_row_updates_parallel(updates);
  }
}

void weighted_block_sum_serial(std::span<const SumTerm> terms, std::size_t rows,
                               std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) sum_row(terms, i, cols, out);
}

void weighted_block_sum_parallel(std::span<const SumTerm> terms, std::size_t rows,
                                 std::size_t cols, double* out) {
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) sum_row(terms, static_cast<std::size_t>(i), cols, out);
}

void weighted_block_sum(std::span<const SumTerm> terms, std::size_t rows, std::size_t cols,
                        double* out, ExecPolicy policy) {
  if (policy == ExecPolicy::Parallel && rows * cols * terms.size() >= kParallelThreshold &&
      omp_get_max_threads() > 1) {
    weighted_block_sum_parallel(terms, rows, cols, out);
  } else {
    weighted_block_sum_serial(terms, rows, cols, out);
  }
}

std::size_t argmax_abs_serial(std::span<const double> values) {
  if (values.empty()) return values.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (beats(values[i], values[best])) best = i;
  }
  return best;
}

std::size_t argmax_abs_parallel(std::span<const double> values) {
  if (values.empty()) return values.size();
  const auto n = static_cast<std::int64_t>(values.size());
  std::size_t best = 0;
#pragma omp parallel
  {
    std::size_t local = values.size();
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (local == values.size() || beats(values[k], values[local])) local = k;
    }
#pragma omp critical
    {
      if (local != values.size()) {
        if (beats(values[local], values[best]) ||
            (!beats(values[best], values[local]) && local < best)) {
          best = local;
        }
      }
    }
  }
  return best;
}

std::size_t argmax_abs(std::span<const double> values, ExecPolicy policy) {
  if (policy == ExecPolicy::Parallel && values.size() >= kParallelThreshold &&
      omp_get_max_threads() > 1) {
    return argmax_abs_parallel(values);
  }
  return argmax_abs_serial(values);
}

}  // namespace hrbr::kernels
