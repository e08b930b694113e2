#include "hrbr/checksum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hrbr/error.hpp"

namespace hrbr {

CodingMatrix coding_matrix(std::size_t n, std::size_t r, CodingScheme scheme) {
  if (scheme != CodingScheme::Sum) throw UnsupportedScheme("only the sum scheme is supported");
  if (n == 0 || r == 0) throw InvalidArgument("coding matrix needs n >= 1 and r >= 1");
  return {n, r, std::vector<double>(n * r, 1.0)};
}

std::vector<double> column_weights(const CodingMatrix& v, std::size_t k, std::size_t q,
                                   const GridSpec& grid, std::size_t n) {
  const std::size_t w = local_cols(q, grid, n);
  std::vector<double> out(w);
  for (std::size_t jl = 0; jl < w; ++jl) {
    out[jl] = v.weight(cyclic_global(q, jl, grid.nb, grid.Q), k);
  }
  return out;
}

void encode_column(DistMatrix& dist, std::size_t pcol, const CodingMatrix& v, ExecPolicy policy) {
  const auto& g = dist.grid();
  const std::size_t n = dist.n();
  if (v.n != n) throw DimensionMismatch("coding matrix order does not match");
  const std::size_t k = dist.coding_index(pcol) % v.m;
  dist.set_coding_index(pcol, k);

  std::vector<std::vector<double>> weights(g.Q);
  for (std::size_t q = 0; q < g.Q; ++q) weights[q] = column_weights(v, k, q, g, n);

  const std::size_t width = spare_cols(g, n);
  std::vector<kernels::SumTerm> terms(g.Q);
  for (std::size_t p = 0; p < g.P; ++p) {
    auto& out = dist.local(p, pcol);
    out.resize_cols(width);
    for (std::size_t q = 0; q < g.Q; ++q) {
      const auto& blk = dist.local(p, dist.data_col(q));
      terms[q] = {blk.data.data(), blk.cols, weights[q].data()};
    }
    kernels::weighted_block_sum(terms, out.rows, width, out.data.data(), policy);
  }
}

DistMatrix encode(DistMatrix dist, const CodingMatrix& v, ExecPolicy policy) {
  const auto& g = dist.grid();
  if (g.r == 0) throw NoRedundancyAllocated("grid has no redundancy columns");
  for (std::size_t pcol : dist.spare_columns()) encode_column(dist, pcol, v, policy);
  return dist;
}

double verify_spare(const DistMatrix& dist, const CodingMatrix& v, std::size_t pcol) {
  const auto& g = dist.grid();
  const std::size_t n = dist.n();
  const std::size_t k = dist.coding_index(pcol) % v.m;
  std::vector<std::vector<double>> weights(g.Q);
  for (std::size_t q = 0; q < g.Q; ++q) weights[q] = column_weights(v, k, q, g, n);

  const double scale = dist.reference_norm() > 0.0 ? dist.reference_norm() : 1.0;
  double worst = 0.0;
  for (std::size_t p = 0; p < g.P; ++p) {
    const auto& e = dist.local(p, pcol);
    for (std::size_t il = 0; il < e.rows; ++il) {
      for (std::size_t jl = 0; jl < e.cols; ++jl) {
        double s = 0.0;
        for (std::size_t q = 0; q < g.Q; ++q) {
          const auto& blk = dist.local(p, dist.data_col(q));
          if (jl < blk.cols) s += weights[q][jl] * blk.at(il, jl);
        }
        const double diff = std::abs(s - e.at(il, jl));
        if (std::isnan(diff)) return std::numeric_limits<double>::quiet_NaN();
        worst = std::max(worst, diff);
      }
    }
  }
  return worst / scale;
}

double verify_checksum(const DistMatrix& dist, const CodingMatrix& v) {
  double worst = 0.0;
  for (std::size_t pcol : dist.spare_columns()) {
    const double d = verify_spare(dist, v, pcol);
    if (std::isnan(d)) return d;
    worst = std::max(worst, d);
  }
  return worst;
}

double checksum_tolerance(std::size_t n, double growth) {
  return 50.0 * static_cast<double>(n) * kUnitRoundoff * std::max(1.0, growth);
}

DenseMatrix expand_coding(const CodingMatrix& v, std::size_t k, const GridSpec& grid,
                          std::size_t n) {
  DenseMatrix out(n, spare_cols(grid, n));
  for (std::size_t j = 0; j < n; ++j) {
    out(j, cyclic_local(j, grid.nb, grid.Q)) = v.weight(j, k % v.m);
  }
  return out;
}

void reconstruct_block(DistMatrix& dist, const ProcCoord& victim, std::size_t spare_pcol,
                       const CodingMatrix& v, ProcStatus restored, ExecPolicy policy) {
  const auto& g = dist.grid();
  const std::size_t n = dist.n();
  const auto logical = dist.logical_col(victim.col);
  if (!logical) throw InvalidArgument("victim does not serve a data column");
  const std::size_t q = *logical;
  const std::size_t k = dist.coding_index(spare_pcol) % v.m;

  const auto& e = dist.local(victim.row, spare_pcol);
  std::vector<double> ones(e.cols, 1.0);
  std::vector<std::vector<double>> neg(g.Q);
  std::vector<kernels::SumTerm> terms;
  terms.push_back({e.data.data(), e.cols, ones.data()});
  for (std::size_t other = 0; other < g.Q; ++other) {
    if (other == q) continue;
    neg[other] = column_weights(v, k, other, g, n);
    for (double& w : neg[other]) w = -w;
    const auto& blk = dist.local(victim.row, dist.data_col(other));
    terms.push_back({blk.data.data(), blk.cols, neg[other].data()});
  }

  auto& out = dist.local(victim);
  kernels::weighted_block_sum(terms, out.rows, out.cols, out.data.data(), policy);
  const auto own = column_weights(v, k, q, g, n);
  for (std::size_t il = 0; il < out.rows; ++il) {
    for (std::size_t jl = 0; jl < out.cols; ++jl) {
      if (own[jl] != 1.0) out.at(il, jl) /= own[jl];
    }
  }

  bool rhs_done = false;
  for (std::size_t c = 0; c < g.total_cols() && !rhs_done; ++c) {
    if (c == victim.col || dist.status(victim.row, c) == ProcStatus::Failed) continue;
    out.rhs = dist.local(victim.row, c).rhs;
    rhs_done = true;
  }
  if (!rhs_done) throw ChecksumBroken("no surviving copy of the right-hand side");

  dist.set_status(victim, restored);
}

}  // namespace hrbr
