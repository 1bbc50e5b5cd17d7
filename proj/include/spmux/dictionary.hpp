#pragma once

#include <memory>
#include <span>
#include <vector>

#include "spmux/model.hpp"

namespace spmux {

// Matrix-free view of the stacked sensing operator. Block n is
// B_n = (P_n kron h_n) / sqrt(M), M*T rows by d columns; the full operator
// [B_1 ... B_N] is never formed. Row index convention: sample (antenna m,
// slot t) lives at m + t*M, matching vec() of the M x T receive matrix.
//
// Correlations use B_n^H r = vec(h_n^H R conj(P_n)) / sqrt(M) with r reshaped
// to R (M x T): one pass of length-M column dots, then length-T dots against
// the precoder columns, O(M*T + T*d) per block instead of O(M*T*d).
class BlockDictionary {
 public:
  BlockDictionary(std::shared_ptr<const PrecoderSet> P, std::shared_ptr<const ChannelSet> H);

  int M() const { return H_->M; }
  int N() const { return P_->N(); }
  int d() const { return P_->d(); }
  int T() const { return P_->T(); }
  std::size_t rows() const { return static_cast<std::size_t>(M()) * T(); }

  const PrecoderSet& precoders() const { return *P_; }
  const ChannelSet& channels() const { return *H_; }

  // out[0..d) = B_j^H r.
  void correlate(std::span<const cplx> r, int j, std::span<cplx> out) const;

  // out is N*d, block-major. Blocks with skip[j] set are left at zero.
  void correlate_all(std::span<const cplx> r, std::span<cplx> out,
                     const std::vector<bool>* skip = nullptr) const;

  // y += scale * B_j * s_j.
  void apply_block_acc(int j, std::span<const cplx> s_j, cplx scale,
                       std::span<cplx> y) const;

  // y += scale * sum_{j in blocks} B_j * s[j*d .. j*d+d), s being a full N*d
  // block vector.
  void apply_blocks_acc(std::span<const int> blocks, std::span<const cplx> s, cplx scale,
                        std::span<cplx> y) const;

  // h_i^H h_j / M; the scalar that turns precoder cross-Grams into block
  // Grams: B_i^H B_j = channel_inner(i,j) * P_i^H P_j.
  cplx channel_inner(int i, int j) const;

  // Spectral norm of B_i^H B_j (i != j allowed; i == j gives the block's own
  // Gram norm).
  double block_gram_norm(int i, int j) const;

  // Dense column-major copy of the selected blocks, rows() x blocks.size()*d.
  // Throws std::length_error if the entry count exceeds entry_cap.
  std::vector<cplx> materialize(std::span<const int> blocks,
                                std::size_t entry_cap = 10'000'000) const;

  // Dense Gram of the selected blocks, column-major n x n with
  // n = blocks.size()*d, assembled from channel inners and precoder cross
  // products without touching the tall operator.
  std::vector<cplx> block_gram_dense(std::span<const int> blocks) const;

 private:
  std::shared_ptr<const PrecoderSet> P_;
  std::shared_ptr<const ChannelSet> H_;
};

}  // namespace spmux
