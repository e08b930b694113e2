#pragma once

#include <cstddef>
#include <vector>

#include "hrbr/dense.hpp"
#include "hrbr/dist_matrix.hpp"
#include "hrbr/kernels.hpp"

namespace hrbr {

enum class CodingScheme { Sum };

/// n x m coding matrix; entry (g, k) is the weight of global column g in
/// redundancy column k.
struct CodingMatrix {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> entries;

  double weight(std::size_t g, std::size_t k) const { return entries[g * m + k]; }
};

CodingMatrix coding_matrix(std::size_t n, std::size_t r, CodingScheme scheme = CodingScheme::Sum);

/// Fills every redundancy column with the weighted sum of the local blocks of
/// the Q active data columns. Redundancy column Q+k uses coding column k mod m.
/// Throws NoRedundancyAllocated when the grid has no redundancy columns.
DistMatrix encode(DistMatrix dist, const CodingMatrix& v, ExecPolicy policy = ExecPolicy::Serial);

/// Rebuilds one redundancy column from the current active data.
void encode_column(DistMatrix& dist, std::size_t pcol, const CodingMatrix& v,
                   ExecPolicy policy = ExecPolicy::Serial);

/// Largest |sum_q w D_q - E| over all redundancy columns and positions,
/// divided by the reference norm. NaN if any participating value is NaN.
double verify_checksum(const DistMatrix& dist, const CodingMatrix& v);
double verify_spare(const DistMatrix& dist, const CodingMatrix& v, std::size_t pcol);

/// 50 n eps, scaled by the element growth of the factorization (at least 1).
double checksum_tolerance(std::size_t n, double growth = 1.0);

/// Global n x w coding matrix of redundancy column with coding index k, so
/// that gather_spare == gather(data) * expand_coding(...).
DenseMatrix expand_coding(const CodingMatrix& v, std::size_t k, const GridSpec& grid,
                          std::size_t n);

/// Per-local-column weights of logical data column q under coding column k.
std::vector<double> column_weights(const CodingMatrix& v, std::size_t k, std::size_t q,
                                   const GridSpec& grid, std::size_t n);

/// Restores the block of `victim` (a process serving data) from the checksum
/// held in redundancy column `spare_pcol` and the surviving blocks of its
/// process row: D_q = (E - sum_{q' != q} w D_q') / w_q. The rhs copy is taken
/// from a surviving process in the same row. The victim gets status `restored`.
void reconstruct_block(DistMatrix& dist, const ProcCoord& victim, std::size_t spare_pcol,
                       const CodingMatrix& v, ProcStatus restored = ProcStatus::Alive,
                       ExecPolicy policy = ExecPolicy::Serial);

}  // namespace hrbr
