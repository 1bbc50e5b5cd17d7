#include "spmux/densela.hpp"

#include <cmath>
#include <stdexcept>

#include "spmux/kernels.hpp"
#include "spmux/rng.hpp"

namespace spmux::la {

double sigma_max(const cplx* A, int m, int n, double tol, int max_iter,
                 std::uint64_t start_seed) {
  const auto& k = spmux::kernels::active();
  RngStream rs(start_seed);
  std::vector<cplx> v(n), w(m);
  for (auto& x : v) x = rs.next_cgauss();
  double vn = std::sqrt(k.norm2sq(v.data(), n));
  if (vn == 0.0) v[0] = 1.0, vn = 1.0;
  for (auto& x : v) x /= vn;

  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    std::fill(w.begin(), w.end(), cplx{});
    k.mv_acc(A, m, n, v.data(), w.data());        // w = A v
    const double s = std::sqrt(k.norm2sq(w.data(), m));
    k.mhv(A, m, n, w.data(), v.data());           // v = A^H w
    const double un = std::sqrt(k.norm2sq(v.data(), n));
    if (un == 0.0) {
      // v landed in the null space; restart from a fresh direction.
      for (auto& x : v) x = rs.next_cgauss();
      const double rn = std::sqrt(k.norm2sq(v.data(), n));
      if (rn == 0.0) return 0.0;
      for (auto& x : v) x /= rn;
      continue;
    }
    for (auto& x : v) x /= un;
    if (it > 0 && std::abs(s - sigma) <= tol * std::max(s, 1e-300)) return s;
    sigma = s;
  }
  return sigma;
}

namespace {

// Hermitian Householder reflector H = I - tau v v^H with v[0] = 1 and real
// tau, chosen so H x = rval e1. tau == 0 encodes the identity (zero input).
// On return x holds v (x[0] overwritten with 1).
struct Reflector {
  double tau = 0.0;
  cplx rval{};
};

Reflector make_reflector(cplx* x, int L) {
  const auto& k = spmux::kernels::active();
  Reflector r;
  if (L <= 0) return r;
  const double tail2 = L > 1 ? k.norm2sq(x + 1, L - 1) : 0.0;
  const cplx x0 = x[0];
  const double alpha = std::sqrt(std::norm(x0) + tail2);
  if (alpha == 0.0) return r;
  const cplx s = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0, 0.0};
  const cplx v0 = x0 + s * alpha;  // |v0| = |x0| + alpha > 0
  for (int i = 1; i < L; ++i) x[i] /= v0;
  r.tau = (std::abs(x0) + alpha) / alpha;
  r.rval = -s * alpha;
  x[0] = cplx{1.0, 0.0};
  return r;
}

void apply_reflector(const cplx* v, double tau, cplx* y, int L) {
  if (tau == 0.0) return;
  const auto& k = spmux::kernels::active();
  const cplx w = k.dotc(v, y, L);  // v^H y
  k.axpy(cplx{-tau, 0.0} * w, v, y, L);
}

}  // namespace

CodSolution cod_least_squares(std::vector<cplx> A, int m, int n, std::span<const cplx> b,
                              double rcond) {
  if (m < n) throw std::invalid_argument("cod_least_squares: m < n");
  if (static_cast<int>(b.size()) != m) throw std::invalid_argument("cod_least_squares: rhs size");
  const auto& k = spmux::kernels::active();

  std::vector<int> perm(n);
  for (int j = 0; j < n; ++j) perm[j] = j;
  std::vector<double> taus(n, 0.0);
  std::vector<cplx> rdiag(n);
  auto col = [&](int j) { return A.data() + static_cast<std::size_t>(j) * m; };

  // Column-pivoted Householder QR. Pivot norms are recomputed exactly each
  // step: this path is the conditioning fallback, not the hot loop, and
  // exactness beats downdating drift.
  for (int kk = 0; kk < n; ++kk) {
    int best = kk;
    double bestn = -1.0;
    for (int j = kk; j < n; ++j) {
      const double nj = k.norm2sq(col(j) + kk, m - kk);
      if (nj > bestn) bestn = nj, best = j;
    }
    if (best != kk) {
      for (int i = 0; i < m; ++i) std::swap(col(kk)[i], col(best)[i]);
      std::swap(perm[kk], perm[best]);
    }
    const Reflector r = make_reflector(col(kk) + kk, m - kk);
    taus[kk] = r.tau;
    rdiag[kk] = r.rval;
    for (int j = kk + 1; j < n; ++j)
      apply_reflector(col(kk) + kk, r.tau, col(j) + kk, m - kk);
  }

  // After the sweep, R's diagonal is rdiag and its strict upper part sits at
  // col(j)[i] for i < j; everything at and below the diagonal stores v.
  const double r00 = std::abs(rdiag[0]);
  int rank = 0;
  for (int j = 0; j < n; ++j) {
    if (r00 > 0.0 && std::abs(rdiag[j]) > rcond * r00)
      ++rank;
    else
      break;
  }

  CodSolution out;
  out.rank = rank;
  out.rank_deficient = rank < n;
  out.x.assign(n, cplx{});
  if (rank == 0) return out;

  // c = Q^H b. Q^H = H_{n-1} ... H_0, rightmost factor first.
  std::vector<cplx> c(b.begin(), b.end());
  for (int kk = 0; kk < n; ++kk)
    apply_reflector(col(kk) + kk, taus[kk], c.data() + kk, m - kk);

  std::vector<cplx> y(n, cplx{});
  if (!out.rank_deficient) {
    for (int i = n - 1; i >= 0; --i) {
      cplx s = c[i];
      for (int j = i + 1; j < n; ++j) s -= col(j)[i] * y[j];
      y[i] = s / rdiag[i];
    }
  } else {
    // Min-norm completion. Let W be the leading rank x n trapezoid of R.
    // Factor W^H = Q2 [R2; 0]; then W = [R2^H 0] Q2^H and the minimum-norm
    // solution of W y = c1 is y = Q2 [R2^{-H} c1; 0]. Reuses the same
    // reflector kit on an n x rank matrix instead of right-side updates.
    const int r = rank;
    std::vector<cplx> Wh(static_cast<std::size_t>(n) * r, cplx{});
    auto whcol = [&](int i) { return Wh.data() + static_cast<std::size_t>(i) * n; };
    for (int i = 0; i < r; ++i) {
      whcol(i)[i] = std::conj(rdiag[i]);
      for (int j = i + 1; j < n; ++j) whcol(i)[j] = std::conj(col(j)[i]);
    }
    std::vector<double> tau2(r, 0.0);
    std::vector<cplx> rdiag2(r);
    for (int kk = 0; kk < r; ++kk) {
      const Reflector rf = make_reflector(whcol(kk) + kk, n - kk);
      tau2[kk] = rf.tau;
      rdiag2[kk] = rf.rval;
      for (int j = kk + 1; j < r; ++j)
        apply_reflector(whcol(kk) + kk, rf.tau, whcol(j) + kk, n - kk);
    }
    // Forward-substitute R2^H u = c1 (R2^H is lower triangular).
    std::vector<cplx> u(r);
    for (int i = 0; i < r; ++i) {
      cplx s = c[i];
      for (int j = 0; j < i; ++j) s -= std::conj(whcol(i)[j]) * u[j];
      u[i] = s / std::conj(rdiag2[i]);
    }
    // y = Q2 [u; 0] = H'_0 ... H'_{r-1} [u; 0], leftmost factor last.
    for (int i = 0; i < r; ++i) y[i] = u[i];
    for (int kk = r - 1; kk >= 0; --kk)
      apply_reflector(whcol(kk) + kk, tau2[kk], y.data() + kk, n - kk);
  }

  for (int j = 0; j < n; ++j) out.x[perm[j]] = y[j];
  return out;
}

double logdet_hermitian(std::vector<cplx> A, int n) {
  auto at = [&](int r, int c) -> cplx& { return A[static_cast<std::size_t>(c) * n + r]; };
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double diag = at(j, j).real();
    for (int q = 0; q < j; ++q) diag -= std::norm(at(j, q));
    if (diag <= 0.0) throw std::runtime_error("logdet_hermitian: matrix not positive definite");
    const double L = std::sqrt(diag);
    at(j, j) = L;
    acc += std::log(L);
    for (int i = j + 1; i < n; ++i) {
      cplx s = at(i, j);
      for (int q = 0; q < j; ++q) s -= at(i, q) * std::conj(at(j, q));
      at(i, j) = s / L;
    }
  }
  return 2.0 * acc;
}

}  // namespace spmux::la
