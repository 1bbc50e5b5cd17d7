#pragma once

#include <span>
#include <vector>

#include "spmux/modulation.hpp"

namespace spmux::la {

using spmux::cplx;

// Largest singular value of a column-major m x n matrix, by power iteration on
// A^H A from a seeded start vector. Stops on relative change below tol or after
// max_iter sweeps, whichever comes first.
double sigma_max(const cplx* A, int m, int n, double tol = 1e-8, int max_iter = 500,
                 std::uint64_t start_seed = 0x51u);

struct CodSolution {
  std::vector<cplx> x;
  int rank = 0;
  bool rank_deficient = false;
};

// Minimum-norm least squares via column-pivoted Householder QR followed by a
// complete orthogonal decomposition when the triangle is rank deficient.
// A is column-major m x n with m >= n and is consumed. Columns with
// |R[k,k]| <= rcond * |R[0,0]| are treated as dependent.
CodSolution cod_least_squares(std::vector<cplx> A, int m, int n, std::span<const cplx> b,
                              double rcond = 1e-12);

// ln det of a Hermitian positive definite matrix (column-major, consumed, only
// the lower triangle is read). Throws std::runtime_error if a Cholesky pivot
// fails.
double logdet_hermitian(std::vector<cplx> A, int n);

}  // namespace spmux::la
