#pragma once

// Independent reference implementations the suites check the library against.
// Everything here is deliberately naive: direct formulas, dense matrices,
// O(n^3) loops, no shared code with src/. The RNG is retyped from the
// documented recurrence in rng.hpp, not called through the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// SplitMix64 exactly as documented.
struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  SplitMix s{seed ^ (0xD1B54A32D192ED03ull * (tag + 1))};
  return s.next();
}

inline double unit_co(SplitMix& s) { return double(s.next() >> 11) * 0x1p-53; }
inline double unit_oc(SplitMix& s) { return double((s.next() >> 11) + 1) * 0x1p-53; }

inline std::uint64_t below(SplitMix& s, std::uint64_t n) {
  return std::uint64_t((static_cast<unsigned __int128>(s.next()) * n) >> 64);
}

inline cplx cgauss(SplitMix& s) {
  const double u1 = unit_oc(s);
  const double u2 = unit_co(s);
  const double r = std::sqrt(-std::log(u1));
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

// Column-major dense matrix.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<cplx> a;
  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c) {}
  cplx& at(int i, int j) { return a[std::size_t(i) + std::size_t(j) * rows]; }
  const cplx& at(int i, int j) const { return a[std::size_t(i) + std::size_t(j) * rows]; }
};

inline Mat identity(int n) {
  Mat I(n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}

inline Mat adjoint(const Mat& A) {
  Mat B(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) B.at(j, i) = std::conj(A.at(i, j));
  return B;
}

inline Mat mul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw std::invalid_argument("mul: shape");
  Mat C(A.rows, B.cols);
  for (int j = 0; j < B.cols; ++j)
    for (int k = 0; k < A.cols; ++k)
      for (int i = 0; i < A.rows; ++i) C.at(i, j) += A.at(i, k) * B.at(k, j);
  return C;
}

inline std::vector<cplx> matvec(const Mat& A, const std::vector<cplx>& x) {
  if (int(x.size()) != A.cols) throw std::invalid_argument("matvec: shape");
  std::vector<cplx> y(A.rows);
  for (int j = 0; j < A.cols; ++j)
    for (int i = 0; i < A.rows; ++i) y[std::size_t(i)] += A.at(i, j) * x[std::size_t(j)];
  return y;
}

// Gauss-Jordan with partial pivoting.
inline Mat inverse(Mat A) {
  if (A.rows != A.cols) throw std::invalid_argument("inverse: square only");
  const int n = A.rows;
  Mat I = identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A.at(r, c)) > std::abs(A.at(piv, c))) piv = r;
    if (std::abs(A.at(piv, c)) < 1e-13) throw std::runtime_error("inverse: singular");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(A.at(c, j), A.at(piv, j));
        std::swap(I.at(c, j), I.at(piv, j));
      }
    const cplx inv_p = 1.0 / A.at(c, c);
    for (int j = 0; j < n; ++j) {
      A.at(c, j) *= inv_p;
      I.at(c, j) *= inv_p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const cplx f = A.at(r, c);
      if (f == cplx{}) continue;
      for (int j = 0; j < n; ++j) {
        A.at(r, j) -= f * A.at(c, j);
        I.at(r, j) -= f * I.at(c, j);
      }
    }
  }
  return I;
}

// Least squares for tall full-rank A via the normal equations.
inline std::vector<cplx> ls_solve(const Mat& A, const std::vector<cplx>& y) {
  const Mat Ah = adjoint(A);
  const Mat G = mul(Ah, A);
  const std::vector<cplx> rhs = matvec(Ah, y);
  return matvec(inverse(G), rhs);
}

// Determinant through LU with partial pivoting.
inline cplx lu_det(Mat A) {
  if (A.rows != A.cols) throw std::invalid_argument("lu_det: square only");
  const int n = A.rows;
  cplx det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A.at(r, c)) > std::abs(A.at(piv, c))) piv = r;
    if (std::abs(A.at(piv, c)) == 0.0) return 0.0;
    if (piv != c) {
      det = -det;
      for (int j = 0; j < n; ++j) std::swap(A.at(c, j), A.at(piv, j));
    }
    det *= A.at(c, c);
    for (int r = c + 1; r < n; ++r) {
      const cplx f = A.at(r, c) / A.at(c, c);
      for (int j = c; j < n; ++j) A.at(r, j) -= f * A.at(c, j);
    }
  }
  return det;
}

// Spectral norm via power iteration on G^H G; fine for the tiny matrices the
// tests build (the Rayleigh quotient converges to sigma_max^2 even when the
// top singular value is repeated).
inline double spectral_norm(const Mat& G) {
  const Mat H = mul(adjoint(G), G);
  const int n = H.rows;
  if (n == 0) return 0.0;
  std::vector<cplx> v(n);
  for (int i = 0; i < n; ++i) v[std::size_t(i)] = cplx(1.0, 0.13 * (i + 1));
  for (int it = 0; it < 1000; ++it) {
    std::vector<cplx> w = matvec(H, v);
    double nrm = 0.0;
    for (const cplx& x : w) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    for (cplx& x : w) x /= nrm;
    v = std::move(w);
  }
  const std::vector<cplx> Hv = matvec(H, v);
  cplx num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += std::conj(v[std::size_t(i)]) * Hv[std::size_t(i)];
    den += std::norm(v[std::size_t(i)]);
  }
  return std::sqrt(std::max(0.0, num.real() / den));
}

// One synthesis block as an explicit (M*T) x d matrix, row index m + t*M:
// column c is the precoder column spread across time, scaled by the channel.
inline Mat kron_block(const cplx* P, int T, int d, const cplx* h, int M) {
  Mat B(M * T, d);
  const double inv_sqrt_m = 1.0 / std::sqrt(double(M));
  for (int c = 0; c < d; ++c)
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m)
        B.at(m + t * M, c) = P[std::size_t(t) + std::size_t(c) * T] * h[m] * inv_sqrt_m;
  return B;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double log2_choose(int n, int k) {
  if (k < 0 || k > n) return -1.0;
  long double acc = 0.0L;
  for (int i = 0; i < k; ++i)
    acc += std::log2((long double)(n - i)) - std::log2((long double)(i + 1));
  return double(acc);
}

}  // namespace oracle
