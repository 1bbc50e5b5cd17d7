#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "spmux/config.hpp"
#include "spmux/rng.hpp"

namespace spmux {

// Substream tags consumed by the generators below. A caller holding one
// per-trial stream forks it with these tags, so the draw for one quantity
// never shifts another's.
enum RngTag : std::uint64_t {
  kTagSupport = 0,
  kTagPayload = 1,
  kTagNoise = 2,
  kTagChannel = 3,
  kTagPrecoder = 4,
};

// Flat i.i.d. unit-variance complex Gaussian channel vectors, one per user.
// Draw order: users 0..N-1, antennas 0..M-1 within a user.
struct ChannelSet {
  int M = 0;
  int N = 0;
  std::vector<cplx> h;  // N * M, user-major

  std::span<const cplx> user(int n) const { return {h.data() + static_cast<std::size_t>(n) * M, static_cast<std::size_t>(M)}; }
  double norm2(int n) const;  // ||h_n||^2
};

// One T x d spreading matrix per user, unit-norm columns; orthonormal columns
// when built with the orthogonal flag. Immutable after construction and safe
// to share across threads.
//
// The cross products P_i^H P_j, their spectral norms, and per-block column
// coherence are memoized here: they depend only on the precoders, so a fixed
// precoder set amortizes them across every trial of a sweep.
class PrecoderSet {
 public:
  PrecoderSet(int T, int d, int N, bool orthogonal, std::vector<cplx> data);

  int T() const { return T_; }
  int d() const { return d_; }
  int N() const { return N_; }
  bool orthogonal() const { return orthogonal_; }

  std::span<const cplx> user(int n) const {
    return {data_.data() + static_cast<std::size_t>(n) * T_ * d_,
            static_cast<std::size_t>(T_) * d_};
  }

  // P_i^H P_j, d x d column-major; i == j gives the block's own Gram. Cached
  // under a byte budget; above it the product is recomputed per call.
  std::shared_ptr<const std::vector<cplx>> cross_gram(int i, int j) const;

  // Spectral norm of P_i^H P_j (power iteration). Always cached.
  double cross_norm(int i, int j) const;

  // sigma_max(P_j)^2, i.e. the spectral norm of P_j^H P_j.
  double self_norm(int j) const;

  // Largest |p_a^H p_b| over distinct columns a,b of P_j.
  double column_coherence(int j) const;

  void set_gram_cache_bytes(std::size_t bytes) { gram_cache_bytes_ = bytes; }

 private:
  std::vector<cplx> compute_cross(int i, int j) const;

  int T_, d_, N_;
  bool orthogonal_;
  std::vector<cplx> data_;

  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<cplx>>> gram_;
  mutable std::unordered_map<std::uint64_t, double> norm_;
  mutable std::vector<double> self_norm_, col_coh_;  // -1 = not yet computed
  mutable std::size_t gram_bytes_used_ = 0;
  std::size_t gram_cache_bytes_ = std::size_t(512) << 20;
};

// One synthesized uplink frame: who transmitted, what they sent, and the
// received samples y = sqrt(rho0*M) * sum_n B_n s_n + z as a length-M*T vector
// (vec of the M x T receive matrix, antenna index fastest).
struct FrameInstance {
  std::vector<int> support;                     // sorted active users
  std::vector<int> msg_len;                     // symbols, per support entry
  std::vector<std::vector<std::uint8_t>> bits;  // payload, per support entry
  std::vector<cplx> symbols;                    // N*d block vector, zero-padded
  std::vector<cplx> noise;                      // M*T
  std::vector<cplx> received;                   // M*T

  // Position of user n inside support, or -1.
  int active_index(int n) const;
  bool is_active(int n) const { return active_index(n) >= 0; }
  std::span<const cplx> block(int n, int d) const {
    return {symbols.data() + static_cast<std::size_t>(n) * d, static_cast<std::size_t>(d)};
  }
};

ChannelSet generate_channels(const SystemConfig& cfg, RngStream& rng);

// Draws T*d complex Gaussians per user (column-major), then normalizes each
// column, or orthonormalizes with modified Gram-Schmidt when
// cfg.precoding_orthogonal is set.
std::shared_ptr<PrecoderSet> generate_precoders(const SystemConfig& cfg, RngStream& rng);

// Support via partial Fisher-Yates (fork kTagSupport), payload bits one per
// draw (fork kTagPayload, users visited in sorted support order), noise (fork
// kTagNoise), then the deterministic mix. Message lengths are uniform on
// [msg_min, msg_max] symbols, drawn before the bits of each user.
FrameInstance synthesize_frame(const SystemConfig& cfg, const PrecoderSet& P,
                               const ChannelSet& H, const RngStream& trial_stream);

}  // namespace spmux
