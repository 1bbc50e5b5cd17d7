#include "spmux/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spmux/densela.hpp"
#include "spmux/kernels.hpp"
#include "spmux/modulation.hpp"

namespace spmux {

double ChannelSet::norm2(int n) const {
  return kernels::active().norm2sq(h.data() + static_cast<std::size_t>(n) * M, M);
}

PrecoderSet::PrecoderSet(int T, int d, int N, bool orthogonal, std::vector<cplx> data)
    : T_(T), d_(d), N_(N), orthogonal_(orthogonal), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(T_) * d_ * N_)
    throw std::invalid_argument("PrecoderSet: data size mismatch");
  self_norm_.assign(N_, -1.0);
  col_coh_.assign(N_, -1.0);
}

std::vector<cplx> PrecoderSet::compute_cross(int i, int j) const {
  const auto& k = kernels::active();
  std::vector<cplx> g(static_cast<std::size_t>(d_) * d_);
  const cplx* Pi = user(i).data();
  const cplx* Pj = user(j).data();
  for (int c = 0; c < d_; ++c)
    k.mhv(Pi, T_, d_, Pj + static_cast<std::size_t>(c) * T_, g.data() + static_cast<std::size_t>(c) * d_);
  return g;
}

std::shared_ptr<const std::vector<cplx>> PrecoderSet::cross_gram(int i, int j) const {
  const bool flip = i > j;
  const int a = flip ? j : i, b = flip ? i : j;
  const std::uint64_t key = static_cast<std::uint64_t>(a) * N_ + b;
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = gram_.find(key);
    if (it != gram_.end()) {
      if (!flip) return it->second;
      auto t = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(d_) * d_);
      const auto& src = *it->second;
      for (int r = 0; r < d_; ++r)
        for (int c = 0; c < d_; ++c)
          (*t)[static_cast<std::size_t>(c) * d_ + r] = std::conj(src[static_cast<std::size_t>(r) * d_ + c]);
      return t;
    }
  }
  auto g = std::make_shared<std::vector<cplx>>(compute_cross(a, b));
  {
    std::lock_guard<std::mutex> lk(mu_);
    const std::size_t bytes = g->size() * sizeof(cplx);
    if (gram_bytes_used_ + bytes <= gram_cache_bytes_ && !gram_.count(key)) {
      gram_.emplace(key, g);
      gram_bytes_used_ += bytes;
    }
  }
  if (!flip) return g;
  auto t = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(d_) * d_);
  for (int r = 0; r < d_; ++r)
    for (int c = 0; c < d_; ++c)
      (*t)[static_cast<std::size_t>(c) * d_ + r] = std::conj((*g)[static_cast<std::size_t>(r) * d_ + c]);
  return t;
}

double PrecoderSet::cross_norm(int i, int j) const {
  if (i == j) return self_norm(i);
  const int a = std::min(i, j), b = std::max(i, j);
  const std::uint64_t key = static_cast<std::uint64_t>(a) * N_ + b;
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = norm_.find(key);
    if (it != norm_.end()) return it->second;
  }
  auto g = cross_gram(a, b);
  const double s = la::sigma_max(g->data(), d_, d_);
  std::lock_guard<std::mutex> lk(mu_);
  norm_.emplace(key, s);
  return s;
}

double PrecoderSet::self_norm(int j) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (self_norm_[j] >= 0.0) return self_norm_[j];
  }
  const double s = la::sigma_max(user(j).data(), T_, d_);
  std::lock_guard<std::mutex> lk(mu_);
  self_norm_[j] = s * s;
  return self_norm_[j];
}

double PrecoderSet::column_coherence(int j) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (col_coh_[j] >= 0.0) return col_coh_[j];
  }
  const auto& k = kernels::active();
  const cplx* P = user(j).data();
  double best = 0.0;
  for (int a = 0; a < d_; ++a)
    for (int b = a + 1; b < d_; ++b) {
      const cplx v = k.dotc(P + static_cast<std::size_t>(a) * T_,
                            P + static_cast<std::size_t>(b) * T_, T_);
      best = std::max(best, std::abs(v));
    }
  std::lock_guard<std::mutex> lk(mu_);
  col_coh_[j] = best;
  return best;
}

ChannelSet generate_channels(const SystemConfig& cfg, RngStream& rng) {
  ChannelSet H;
  H.M = cfg.M;
  H.N = cfg.N;
  H.h.resize(static_cast<std::size_t>(cfg.M) * cfg.N);
  for (auto& v : H.h) v = rng.next_cgauss();
  return H;
}

std::shared_ptr<PrecoderSet> generate_precoders(const SystemConfig& cfg, RngStream& rng) {
  const int T = cfg.T, d = cfg.d, N = cfg.N;
  const auto& k = kernels::active();
  std::vector<cplx> data(static_cast<std::size_t>(T) * d * N);
  for (auto& v : data) v = rng.next_cgauss();

  for (int n = 0; n < N; ++n) {
    cplx* P = data.data() + static_cast<std::size_t>(n) * T * d;
    for (int c = 0; c < d; ++c) {
      cplx* col = P + static_cast<std::size_t>(c) * T;
      if (cfg.precoding_orthogonal) {
        for (int q = 0; q < c; ++q) {
          const cplx* prev = P + static_cast<std::size_t>(q) * T;
          k.axpy(-k.dotc(prev, col, T), prev, col, T);
        }
      }
      const double nrm = std::sqrt(k.norm2sq(col, T));
      if (nrm < 1e-8 * std::sqrt(static_cast<double>(T)))
        throw std::runtime_error("generate_precoders: degenerate column draw");
      const double inv = 1.0 / nrm;
      for (int t = 0; t < T; ++t) col[t] *= inv;
    }
  }
  return std::make_shared<PrecoderSet>(T, d, N, cfg.precoding_orthogonal, std::move(data));
}

int FrameInstance::active_index(int n) const {
  auto it = std::lower_bound(support.begin(), support.end(), n);
  if (it == support.end() || *it != n) return -1;
  return static_cast<int>(it - support.begin());
}

FrameInstance synthesize_frame(const SystemConfig& cfg, const PrecoderSet& P,
                               const ChannelSet& H, const RngStream& trial_stream) {
  if (P.T() != cfg.T || P.d() != cfg.d || P.N() != cfg.N || H.M != cfg.M || H.N != cfg.N)
    throw std::invalid_argument("synthesize_frame: config does not match model objects");
  const auto& k = kernels::active();
  FrameInstance f;

  {
    RngStream rs = trial_stream.fork(kTagSupport);
    std::vector<int> arr(cfg.N);
    for (int i = 0; i < cfg.N; ++i) arr[i] = i;
    for (int i = 0; i < cfg.N_a; ++i) {
      const int j = i + static_cast<int>(rs.next_below(cfg.N - i));
      std::swap(arr[i], arr[j]);
    }
    f.support.assign(arr.begin(), arr.begin() + cfg.N_a);
    std::sort(f.support.begin(), f.support.end());
  }

  const int bps = bits_per_symbol(cfg.modulation);
  f.symbols.assign(static_cast<std::size_t>(cfg.N) * cfg.d, cplx{});
  {
    RngStream rs = trial_stream.fork(kTagPayload);
    for (int n : f.support) {
      const int len = cfg.msg_min() + static_cast<int>(rs.next_below(cfg.msg_max() - cfg.msg_min() + 1));
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(len) * bps);
      for (auto& b : bits) b = static_cast<std::uint8_t>(rs.next_bit());
      auto syms = modulate(bits, cfg.modulation);
      std::copy(syms.begin(), syms.end(), f.symbols.begin() + static_cast<std::size_t>(n) * cfg.d);
      f.msg_len.push_back(len);
      f.bits.push_back(std::move(bits));
    }
  }

  {
    RngStream rs = trial_stream.fork(kTagNoise);
    f.noise.resize(static_cast<std::size_t>(cfg.M) * cfg.T);
    for (auto& v : f.noise) v = rs.next_cgauss();
  }

  f.received = f.noise;
  const double g = std::sqrt(cfg.rho0);  // sqrt(rho0*M)/sqrt(M)
  std::vector<cplx> x(cfg.T);
  for (int n : f.support) {
    std::fill(x.begin(), x.end(), cplx{});
    k.mv_acc(P.user(n).data(), cfg.T, cfg.d, f.symbols.data() + static_cast<std::size_t>(n) * cfg.d,
             x.data());
    k.rank1_acc(f.received.data(), cfg.M, cfg.T, H.h.data() + static_cast<std::size_t>(n) * cfg.M,
                x.data(), cplx{g, 0.0});
  }
  return f;
}

}  // namespace spmux
