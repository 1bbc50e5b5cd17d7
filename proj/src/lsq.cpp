#include "spmux/lsq.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spmux/densela.hpp"
#include "spmux/kernels.hpp"

namespace spmux {

namespace {
// Offset of packed row i; row i holds entries [0..i].
inline std::size_t tri(std::size_t i) { return i * (i + 1) / 2; }
}  // namespace

BlockLs::BlockLs(const BlockDictionary& D, double ridge) : D_(&D), ridge_(ridge) {
  if (ridge < 0.0) throw std::invalid_argument("BlockLs: negative ridge");
}

bool BlockLs::append(int j, std::span<const cplx> rhs_j) {
  const int d = D_->d();
  assert(rhs_j.size() == static_cast<std::size_t>(d));
  for (int b : lambda_)
    if (b == j) throw std::logic_error("BlockLs: block appended twice");
  if (static_cast<std::size_t>(n_ + d) > D_->rows())
    throw std::logic_error("BlockLs: more unknowns than samples");

  const int p = blocks();
  const int n_old = n_;
  const int n_new = n_old + d;

  std::vector<cplx> G2(static_cast<std::size_t>(n_new) * n_new);
  for (int col = 0; col < n_old; ++col)
    std::copy_n(G_.data() + static_cast<std::size_t>(col) * n_old, n_old,
                G2.data() + static_cast<std::size_t>(col) * n_new);
  G_.swap(G2);

  lambda_.push_back(j);
  n_ = n_new;

  auto at = [&](int r, int c) -> cplx& { return G_[r + static_cast<std::size_t>(c) * n_]; };
  for (int a = 0; a <= p; ++a) {
    const cplx ci = D_->channel_inner(lambda_[a], j);
    const auto cg = D_->precoders().cross_gram(lambda_[a], j);
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) {
        const cplx v = ci * (*cg)[r + static_cast<std::size_t>(c) * d];
        at(a * d + r, p * d + c) = v;
        at(p * d + c, a * d + r) = std::conj(v);
      }
  }
  if (ridge_ > 0.0)
    for (int c = 0; c < d; ++c) at(p * d + c, p * d + c) += ridge_;

  c_.insert(c_.end(), rhs_j.begin(), rhs_j.end());
  return refactor_from(ok_ ? n_old : 0);
}

void BlockLs::remove(int pos) {
  const int d = D_->d();
  assert(pos >= 0 && pos < blocks());
  const int r0 = pos * d;
  const int n_new = n_ - d;

  std::vector<cplx> G2(static_cast<std::size_t>(n_new) * n_new);
  int c2 = 0;
  for (int c = 0; c < n_; ++c) {
    if (c >= r0 && c < r0 + d) continue;
    int r2 = 0;
    for (int r = 0; r < n_; ++r) {
      if (r >= r0 && r < r0 + d) continue;
      G2[r2 + static_cast<std::size_t>(c2) * n_new] = G_[r + static_cast<std::size_t>(c) * n_];
      ++r2;
    }
    ++c2;
  }
  G_.swap(G2);
  c_.erase(c_.begin() + r0, c_.begin() + r0 + d);
  lambda_.erase(lambda_.begin() + pos);
  const bool was_ok = ok_;
  n_ = n_new;
  refactor_from(was_ok ? r0 : 0);
}

void BlockLs::add_to_rhs(int pos, std::span<const cplx> delta) {
  const int d = D_->d();
  assert(pos >= 0 && pos < blocks());
  assert(delta.size() == static_cast<std::size_t>(d));
  kernels::active().axpy(cplx{1.0, 0.0}, delta.data(),
                         c_.data() + static_cast<std::size_t>(pos) * d, d);
}

bool BlockLs::refactor_from(int row0) {
  const auto& k = kernels::active();
  L_.resize(tri(static_cast<std::size_t>(n_)));
  ok_ = true;
  auto G = [&](int r, int c) -> cplx { return G_[r + static_cast<std::size_t>(c) * n_]; };
  for (int i = row0; i < n_; ++i) {
    cplx* Li = L_.data() + tri(static_cast<std::size_t>(i));
    for (int j = 0; j < i; ++j) {
      const cplx* Lj = L_.data() + tri(static_cast<std::size_t>(j));
      Li[j] = (G(i, j) - k.dotc(Lj, Li, j)) / Lj[j].real();
    }
    const double v = G(i, i).real() - k.norm2sq(Li, i);
    if (!(v > 0.0) || !std::isfinite(v)) {
      ok_ = false;
      return false;
    }
    Li[i] = std::sqrt(v);
  }
  return true;
}

void BlockLs::solve(std::span<cplx> out) const {
  if (!ok_) throw std::logic_error("BlockLs::solve: factorization failed");
  assert(out.size() == static_cast<std::size_t>(n_));
  const auto& k = kernels::active();
  // L z = c, rows are contiguous prefixes.
  for (int i = 0; i < n_; ++i) {
    const cplx* Li = L_.data() + tri(static_cast<std::size_t>(i));
    out[i] = (c_[i] - k.dotu(Li, out.data(), i)) / Li[i].real();
  }
  // L^H out = z as a column sweep: finalizing out[i] retires row i, again a
  // contiguous prefix.
  for (int i = n_ - 1; i >= 0; --i) {
    const cplx* Li = L_.data() + tri(static_cast<std::size_t>(i));
    out[i] /= Li[i].real();
    if (i > 0) k.axpy_conj(-out[i], Li, out.data(), i);
  }
}

double BlockLs::cond_estimate() const {
  if (!ok_) return std::numeric_limits<double>::infinity();
  if (n_ == 0) return 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double v = L_[tri(static_cast<std::size_t>(i)) + i].real();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

RestrictedLs restricted_ls(const BlockDictionary& D, std::span<const int> blocks,
                           std::span<const cplx> y, double ridge, double cond_limit) {
  const int d = D.d();
  const std::size_t m = D.rows();
  const std::size_t n = blocks.size() * static_cast<std::size_t>(d);
  if (n > m) throw std::invalid_argument("restricted_ls: more unknowns than samples");
  assert(y.size() == m);

  RestrictedLs out;
  BlockLs ls(D, ridge);
  std::vector<cplx> rhs(d);
  bool healthy = true;
  for (int j : blocks) {
    D.correlate(y, j, rhs);
    if (!ls.append(j, rhs)) healthy = false;
  }
  if (healthy && ridge == 0.0 && ls.cond_estimate() >= cond_limit) healthy = false;

  constexpr std::size_t kDenseCap = 10'000'000;
  const bool can_dense = n == 0 || m <= kDenseCap / n;
  if (healthy || (!can_dense && ls.ok())) {
    // Second case: the set is ill conditioned but too large to densify;
    // the Cholesky solution is still the best answer available.
    out.coeff.resize(n);
    ls.solve(out.coeff);
    return out;
  }
  if (!can_dense)
    throw std::runtime_error("restricted_ls: singular system exceeds dense fallback cap");

  out.used_fallback = true;
  std::vector<cplx> A = D.materialize(blocks);
  if (ridge > 0.0) {
    // Augment with sqrt(ridge) * I rows; the plain QR then solves the
    // regularized normal equations.
    const double sr = std::sqrt(ridge);
    std::vector<cplx> Aug((m + n) * n);
    std::vector<cplx> baug(m + n, cplx{});
    for (std::size_t c = 0; c < n; ++c) {
      std::copy_n(A.data() + c * m, m, Aug.data() + c * (m + n));
      Aug[c * (m + n) + m + c] = sr;
    }
    std::copy(y.begin(), y.end(), baug.begin());
    auto sol = la::cod_least_squares(std::move(Aug), static_cast<int>(m + n),
                                     static_cast<int>(n), baug);
    out.coeff = std::move(sol.x);
    out.rank_deficient = sol.rank_deficient;
  } else {
    std::vector<cplx> b(y.begin(), y.end());
    auto sol =
        la::cod_least_squares(std::move(A), static_cast<int>(m), static_cast<int>(n), b);
    out.coeff = std::move(sol.x);
    out.rank_deficient = sol.rank_deficient;
  }
  return out;
}

}  // namespace spmux
