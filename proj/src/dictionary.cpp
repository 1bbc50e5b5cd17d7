#include "spmux/dictionary.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "spmux/kernels.hpp"

namespace spmux {

BlockDictionary::BlockDictionary(std::shared_ptr<const PrecoderSet> P,
                                 std::shared_ptr<const ChannelSet> H)
    : P_(std::move(P)), H_(std::move(H)) {
  if (!P_ || !H_) throw std::invalid_argument("BlockDictionary: null component");
  if (P_->N() != H_->N) throw std::invalid_argument("BlockDictionary: user count mismatch");
}

void BlockDictionary::correlate(std::span<const cplx> r, int j, std::span<cplx> out) const {
  assert(r.size() == rows());
  assert(out.size() == static_cast<std::size_t>(d()));
  const auto& k = kernels::active();
  const cplx* h = H_->user(j).data();
  // w = h_j^H R with r viewed as the M x T receive matrix.
  std::vector<cplx> w(T());
  k.vhm(r.data(), M(), T(), h, w.data());
  // out = P_j^H-style contraction: out[c] = sum_t w[t] conj(P_j[t,c]).
  k.mhv(P_->user(j).data(), T(), d(), w.data(), out.data());
  const double g = 1.0 / std::sqrt(static_cast<double>(M()));
  for (auto& v : out) v *= g;
}

void BlockDictionary::correlate_all(std::span<const cplx> r, std::span<cplx> out,
                                    const std::vector<bool>* skip) const {
  assert(out.size() == static_cast<std::size_t>(N()) * d());
  std::fill(out.begin(), out.end(), cplx{});
  for (int j = 0; j < N(); ++j) {
    if (skip && (*skip)[j]) continue;
    correlate(r, j, out.subspan(static_cast<std::size_t>(j) * d(), d()));
  }
}

void BlockDictionary::apply_block_acc(int j, std::span<const cplx> s_j, cplx scale,
                                      std::span<cplx> y) const {
  assert(s_j.size() == static_cast<std::size_t>(d()));
  assert(y.size() == rows());
  const auto& k = kernels::active();
  std::vector<cplx> x(T());
  k.mv_acc(P_->user(j).data(), T(), d(), s_j.data(), x.data());
  const cplx g = scale / std::sqrt(static_cast<double>(M()));
  k.rank1_acc(y.data(), M(), T(), H_->user(j).data(), x.data(), g);
}

void BlockDictionary::apply_blocks_acc(std::span<const int> blocks, std::span<const cplx> s,
                                       cplx scale, std::span<cplx> y) const {
  assert(s.size() == static_cast<std::size_t>(N()) * d());
  assert(y.size() == rows());
  const auto& k = kernels::active();
  const cplx g = scale / std::sqrt(static_cast<double>(M()));
  std::vector<cplx> x(T());
  for (int j : blocks) {
    std::fill(x.begin(), x.end(), cplx{});
    k.mv_acc(P_->user(j).data(), T(), d(), s.data() + static_cast<std::size_t>(j) * d(),
             x.data());
    k.rank1_acc(y.data(), M(), T(), H_->user(j).data(), x.data(), g);
  }
}

cplx BlockDictionary::channel_inner(int i, int j) const {
  const auto& k = kernels::active();
  return k.dotc(H_->user(i).data(), H_->user(j).data(), M()) /
         static_cast<double>(M());
}

double BlockDictionary::block_gram_norm(int i, int j) const {
  if (i == j) return H_->norm2(j) / M() * P_->self_norm(j);
  return std::abs(channel_inner(i, j)) * P_->cross_norm(i, j);
}

std::vector<cplx> BlockDictionary::materialize(std::span<const int> blocks,
                                               std::size_t entry_cap) const {
  const std::size_t cols = blocks.size() * static_cast<std::size_t>(d());
  const std::size_t entries = rows() * cols;
  if (cols != 0 && entries / cols != rows())
    throw std::length_error("materialize: entry count overflow");
  if (entries > entry_cap) throw std::length_error("materialize: dense copy exceeds cap");

  std::vector<cplx> A(entries);
  const double g = 1.0 / std::sqrt(static_cast<double>(M()));
  std::size_t colbase = 0;
  for (int j : blocks) {
    const cplx* h = H_->user(j).data();
    const cplx* Pj = P_->user(j).data();
    for (int c = 0; c < d(); ++c) {
      cplx* colp = A.data() + (colbase + c) * rows();
      for (int t = 0; t < T(); ++t) {
        const cplx ptc = Pj[t + static_cast<std::size_t>(c) * T()] * g;
        for (int m = 0; m < M(); ++m) colp[m + static_cast<std::size_t>(t) * M()] = ptc * h[m];
      }
    }
    colbase += d();
  }
  return A;
}

std::vector<cplx> BlockDictionary::block_gram_dense(std::span<const int> blocks) const {
  const int d_ = d();
  const std::size_t nb = blocks.size();
  const std::size_t n = nb * d_;
  std::vector<cplx> G(n * n);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t a = 0; a <= b; ++a) {
      const cplx ci = channel_inner(blocks[a], blocks[b]);
      const auto cg = P_->cross_gram(blocks[a], blocks[b]);
      for (int c = 0; c < d_; ++c)
        for (int r = 0; r < d_; ++r) {
          const cplx v = ci * (*cg)[r + static_cast<std::size_t>(c) * d_];
          G[(a * d_ + r) + (b * d_ + c) * n] = v;
          G[(b * d_ + c) + (a * d_ + r) * n] = std::conj(v);
        }
    }
  return G;
}

}  // namespace spmux
