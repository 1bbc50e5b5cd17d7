#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace spmux::kernels {

using cplx = std::complex<double>;

// Flat table of the complex primitives the hot paths are built from. Two
// implementations exist: a portable scalar reference and an AVX2+FMA variant
// compiled in its own translation unit. The active table is picked at runtime
// from CPU capabilities and can be overridden (tests force both backends).
//
// All matrices are column-major with unit column stride.
struct Backend {
  const char* name;

  // sum_i conj(x[i]) * y[i]
  cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
  // sum_i x[i] * y[i]
  cplx (*dotu)(const cplx* x, const cplx* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // y[i] += a * conj(x[i])
  void (*axpy_conj)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // sum_i |x[i]|^2
  double (*norm2sq)(const cplx* x, std::size_t n);

  // y[j] = sum_i conj(x[i]) * A[i + j*m]   (x^H A, row vector result)
  void (*vhm)(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y);
  // y[j] = sum_i conj(A[i + j*m]) * x[i]   (A^H x)
  void (*mhv)(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y);
  // y[i] += sum_j A[i + j*m] * x[j]        (y += A x)
  void (*mv_acc)(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y);
  // R[i + t*m] += g * x[t] * h[i]          (rank-one accumulate into an m x n panel)
  void (*rank1_acc)(cplx* R, std::size_t m, std::size_t n, const cplx* h, const cplx* x, cplx g);
};

const Backend& scalar_backend();

// Null when the build or the running CPU lacks AVX2+FMA.
const Backend* avx2_backend();

// Currently selected table. Initial selection: SPMUX_KERNELS env var if set
// ("scalar", "avx2", "auto"), else the widest supported path.
const Backend& active();

// Returns false if the named backend is unavailable; "auto" always succeeds.
bool select(std::string_view name);

}  // namespace spmux::kernels
