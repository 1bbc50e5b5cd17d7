#include "spmux/kernels.hpp"

// Compiled with -mavx2 -mfma on x86-64 (see CMakeLists); the dispatch unit only
// hands this table out after checking CPU support at runtime.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace spmux::kernels {
namespace {

// Lane layout: one __m256d holds two complex doubles [re0, im0, re1, im1].

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Difference of even and odd lanes: v0 - v1 + v2 - v3.
inline double hsum_alt(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_sub_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Shared product accumulation: pa += x .* y, pb += x .* swap(y). dotc and dotu
// differ only in how the lane pairs are reduced at the end.
inline void dot_cores(const cplx* x, const cplx* y, std::size_t n,
                      __m256d& pa, __m256d& pb, std::size_t& done) {
  const double* xd = dp(x);
  const double* yd = dp(y);
  __m256d a0 = _mm256_setzero_pd(), b0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd(), b1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx0 = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy0 = _mm256_loadu_pd(yd + 2 * i);
    __m256d vx1 = _mm256_loadu_pd(xd + 2 * i + 4);
    __m256d vy1 = _mm256_loadu_pd(yd + 2 * i + 4);
    a0 = _mm256_fmadd_pd(vx0, vy0, a0);
    b0 = _mm256_fmadd_pd(vx0, _mm256_permute_pd(vy0, 0x5), b0);
    a1 = _mm256_fmadd_pd(vx1, vy1, a1);
    b1 = _mm256_fmadd_pd(vx1, _mm256_permute_pd(vy1, 0x5), b1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    a0 = _mm256_fmadd_pd(vx, vy, a0);
    b0 = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0x5), b0);
  }
  pa = _mm256_add_pd(a0, a1);
  pb = _mm256_add_pd(b0, b1);
  done = i;
}

cplx v_dotc(const cplx* x, const cplx* y, std::size_t n) {
  __m256d pa, pb;
  std::size_t i;
  dot_cores(x, y, n, pa, pb, i);
  // re: xr*yr + xi*yi (pair sums of pa); im: xr*yi - xi*yr (alternating pb).
  double re = hsum(pa), im = hsum_alt(pb);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

cplx v_dotu(const cplx* x, const cplx* y, std::size_t n) {
  __m256d pa, pb;
  std::size_t i;
  dot_cores(x, y, n, pa, pb, i);
  double re = hsum_alt(pa), im = hsum(pb);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

void v_axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  const __m256d vre = _mm256_set1_pd(ar);
  const __m256d vim = _mm256_setr_pd(-ai, ai, -ai, ai);
  const double* xd = dp(x);
  double* yd = dp(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    vy = _mm256_fmadd_pd(vre, vx, vy);
    vy = _mm256_fmadd_pd(vim, _mm256_permute_pd(vx, 0x5), vy);
    _mm256_storeu_pd(yd + 2 * i, vy);
  }
  for (; i < n; ++i) {
    y[i] = {y[i].real() + ar * x[i].real() - ai * x[i].imag(),
            y[i].imag() + ar * x[i].imag() + ai * x[i].real()};
  }
}

void v_axpy_conj(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  // y += a*conj(x): re += ar*xr + ai*xi, im += ai*xr - ar*xi.
  const __m256d c1 = _mm256_setr_pd(ar, -ar, ar, -ar);
  const __m256d c2 = _mm256_set1_pd(ai);
  const double* xd = dp(x);
  double* yd = dp(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    vy = _mm256_fmadd_pd(c1, vx, vy);
    vy = _mm256_fmadd_pd(c2, _mm256_permute_pd(vx, 0x5), vy);
    _mm256_storeu_pd(yd + 2 * i, vy);
  }
  for (; i < n; ++i) {
    y[i] = {y[i].real() + ar * x[i].real() + ai * x[i].imag(),
            y[i].imag() + ai * x[i].real() - ar * x[i].imag()};
  }
}

double v_norm2sq(const cplx* x, std::size_t n) {
  const double* xd = dp(x);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(xd + 2 * i);
    __m256d v1 = _mm256_loadu_pd(xd + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(xd + 2 * i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i)
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

void v_vhm(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = v_dotc(x, A + j * m, m);
}

void v_mhv(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = v_dotc(A + j * m, x, m);
}

void v_mv_acc(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) v_axpy(x[j], A + j * m, y, m);
}

void v_rank1_acc(cplx* R, std::size_t m, std::size_t n, const cplx* h, const cplx* x, cplx g) {
  for (std::size_t t = 0; t < n; ++t) v_axpy(g * x[t], h, R + t * m, m);
}

constexpr Backend kAvx2 = {
    "avx2", v_dotc, v_dotu, v_axpy, v_axpy_conj, v_norm2sq,
    v_vhm,  v_mhv,  v_mv_acc, v_rank1_acc,
};

}  // namespace

const Backend* avx2_backend_table() { return &kAvx2; }

}  // namespace spmux::kernels

#else

namespace spmux::kernels {
const Backend* avx2_backend_table() { return nullptr; }
}  // namespace spmux::kernels

#endif
