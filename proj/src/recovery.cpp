#include "spmux/recovery.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "spmux/densela.hpp"
#include "spmux/kernels.hpp"

namespace spmux {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::bomp: return "bomp";
    case Algorithm::icbomp: return "icbomp";
    case Algorithm::oracle_ls: return "oracle_ls";
    case Algorithm::oracle_ic_mmse: return "oracle_ic_mmse";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "bomp") return Algorithm::bomp;
  if (s == "icbomp") return Algorithm::icbomp;
  if (s == "oracle_ls") return Algorithm::oracle_ls;
  if (s == "oracle_ic_mmse") return Algorithm::oracle_ic_mmse;
  throw std::invalid_argument("unknown algorithm: " + s);
}

std::vector<int> RecoveryResult::identified() const {
  std::vector<int> out(support);
  out.insert(out.end(), cancelled.begin(), cancelled.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr double kCondLimit = 1e6;

// Shared solve/refit state for the greedy loop and the oracles.
struct FitState {
  const BlockDictionary* D;
  double gain;  // sqrt(rho0 * M)
  BlockLs ls;
  std::vector<cplx> y_w;     // working observation, shrinks on cancellation
  std::vector<cplx> z;       // current coefficients, ls.support() block-major
  std::vector<cplx> resid;   // y_w - B_Lambda z
  std::vector<cplx> full_z;  // N*d scatter scratch
  RecoveryResult* out;

  FitState(const BlockDictionary& dict, double ridge, std::span<const cplx> y,
           RecoveryResult* res)
      : D(&dict), gain(0.0), ls(dict, ridge), y_w(y.begin(), y.end()),
        full_z(static_cast<std::size_t>(dict.N()) * dict.d()), out(res) {}

  // Solves for the current set; dense QR takes over when the factor is gone
  // or too ill conditioned to trust.
  void solve() {
    z.resize(ls.size());
    if (ls.ok() && ls.cond_estimate() < kCondLimit) {
      ls.solve(z);
      return;
    }
    out->used_fallback = true;
    std::vector<cplx> A;
    try {
      A = D->materialize(ls.support());
    } catch (const std::length_error&) {
      if (!ls.ok()) throw std::runtime_error("recovery: singular fit too large to densify");
      ls.solve(z);  // ill conditioned but solvable; best available answer
      return;
    }
    std::vector<cplx> b(y_w.begin(), y_w.end());
    auto sol = la::cod_least_squares(std::move(A), static_cast<int>(D->rows()), ls.size(), b);
    z = std::move(sol.x);
    out->rank_deficient = out->rank_deficient || sol.rank_deficient;
  }

  // resid = y_w - B_Lambda z for the latest z.
  void refresh_residual() {
    std::fill(full_z.begin(), full_z.end(), cplx{});
    const auto& lam = ls.support();
    for (std::size_t a = 0; a < lam.size(); ++a)
      std::copy_n(z.data() + a * D->d(), D->d(),
                  full_z.data() + static_cast<std::size_t>(lam[a]) * D->d());
    resid.assign(y_w.begin(), y_w.end());
    D->apply_blocks_acc(lam, full_z, cplx{-1.0, 0.0}, resid);
  }

  double residual_norm() const {
    return std::sqrt(kernels::active().norm2sq(resid.data(), resid.size()));
  }

  // Removes the block at position pos, subtracting its exact contribution
  // from the working observation and from the stored correlations.
  void cancel(int pos, std::span<const cplx> s_true) {
    const int d = D->d();
    const int user = ls.support()[pos];
    D->apply_block_acc(user, s_true, cplx{-gain, 0.0}, y_w);
    ls.remove(pos);
    std::vector<cplx> delta(d);
    for (int a = 0; a < ls.blocks(); ++a) {
      const int other = ls.support()[a];
      const cplx ci = D->channel_inner(other, user);
      const auto cg = D->precoders().cross_gram(other, user);  // P_other^H P_user
      std::fill(delta.begin(), delta.end(), cplx{});
      kernels::active().mv_acc(cg->data(), d, d, s_true.data(), delta.data());
      const cplx g = cplx{-gain, 0.0} * ci;
      for (int r = 0; r < d; ++r) delta[r] *= g;
      ls.add_to_rhs(a, delta);
    }
  }
};

// Greedy pursuit; codec == nullptr disables certification and gives the
// plain variant.
RecoveryResult greedy(const BlockDictionary& D, const SystemConfig& cfg,
                      std::span<const cplx> y, const GenieCodec* codec) {
  const auto& k = kernels::active();
  const int N = D.N();
  const int d = D.d();
  RecoveryResult out;
  out.estimates.assign(static_cast<std::size_t>(N) * d, cplx{});
  FitState st(D, 0.0, y, &out);
  st.gain = std::sqrt(cfg.rho0 * cfg.M);
  st.resid.assign(y.begin(), y.end());

  const double y_norm = std::sqrt(k.norm2sq(y.data(), y.size()));
  std::vector<bool> skip(N, false);
  std::vector<cplx> corr(static_cast<std::size_t>(N) * d);
  std::vector<cplx> rhs(d);
  std::vector<cplx> est(d);

  for (int iter = 1; iter <= cfg.K; ++iter) {
    D.correlate_all(st.resid, corr, &skip);
    int best = -1;
    double best_en = 0.0;
    for (int j = 0; j < N; ++j) {
      if (skip[j]) continue;
      const double en = k.norm2sq(corr.data() + static_cast<std::size_t>(j) * d, d);
      if (en > best_en) best_en = en, best = j;  // ties keep the lowest index
    }
    if (best < 0) break;

    skip[best] = true;
    D.correlate(st.y_w, best, rhs);
    if (!st.ls.append(best, rhs)) out.factor_failed = true;
    st.solve();
    st.refresh_residual();
    out.iterations = iter;
    out.trace.push_back({iter, best, st.residual_norm(), {}});

    if (codec) {
      bool any = false;
      for (int pos = st.ls.blocks() - 1; pos >= 0; --pos) {
        const int user = st.ls.support()[pos];
        const cplx* zb = st.z.data() + static_cast<std::size_t>(pos) * d;
        for (int c = 0; c < d; ++c) est[c] = zb[c] / st.gain;
        if (!codec->decode(user, est).certified) continue;
        const auto s_true = codec->truth().block(user, d);
        std::copy(s_true.begin(), s_true.end(),
                  out.estimates.data() + static_cast<std::size_t>(user) * d);
        out.cancelled.push_back(user);
        out.trace.back().cancelled.push_back(user);
        st.cancel(pos, s_true);
        any = true;
      }
      if (any) {
        st.solve();
        st.refresh_residual();
        out.trace.back().residual_norm = st.residual_norm();
      }
    }

    if (cfg.epsilon_stop > 0.0 && st.residual_norm() <= cfg.epsilon_stop * y_norm) break;
  }

  out.support = st.ls.support();
  for (std::size_t a = 0; a < out.support.size(); ++a) {
    cplx* dst = out.estimates.data() + static_cast<std::size_t>(out.support[a]) * d;
    const cplx* zb = st.z.data() + a * d;
    for (int c = 0; c < d; ++c) dst[c] = zb[c] / st.gain;
  }
  return out;
}

}  // namespace

RecoveryResult bomp(const BlockDictionary& D, const SystemConfig& cfg,
                    std::span<const cplx> y) {
  return greedy(D, cfg, y, nullptr);
}

RecoveryResult icbomp(const BlockDictionary& D, const SystemConfig& cfg,
                      std::span<const cplx> y, const GenieCodec& codec) {
  return greedy(D, cfg, y, &codec);
}

RecoveryResult oracle_ls(const BlockDictionary& D, const SystemConfig& cfg,
                         std::span<const cplx> y, std::span<const int> support) {
  const int d = D.d();
  const double gain = std::sqrt(cfg.rho0 * cfg.M);
  RecoveryResult out;
  out.estimates.assign(static_cast<std::size_t>(D.N()) * d, cplx{});
  auto sol = restricted_ls(D, support, y);
  out.used_fallback = sol.used_fallback;
  out.rank_deficient = sol.rank_deficient;
  out.support.assign(support.begin(), support.end());
  for (std::size_t a = 0; a < support.size(); ++a) {
    cplx* dst = out.estimates.data() + static_cast<std::size_t>(support[a]) * d;
    for (int c = 0; c < d; ++c) dst[c] = sol.coeff[a * d + c] / gain;
  }
  out.iterations = 1;
  return out;
}

RecoveryResult oracle_ic_mmse(const BlockDictionary& D, const SystemConfig& cfg,
                              std::span<const cplx> y, const GenieCodec& codec) {
  const int d = D.d();
  const double gain = std::sqrt(cfg.rho0 * cfg.M);
  const double ridge = 1.0 / (cfg.rho0 * cfg.M);
  RecoveryResult out;
  out.estimates.assign(static_cast<std::size_t>(D.N()) * d, cplx{});

  std::vector<int> remaining(codec.truth().support);
  std::vector<cplx> y_w(y.begin(), y.end());
  std::vector<cplx> est(d);
  std::vector<cplx> coeff;

  for (;;) {
    ++out.iterations;
    auto sol = restricted_ls(D, remaining, y_w, ridge);
    out.used_fallback = out.used_fallback || sol.used_fallback;
    out.rank_deficient = out.rank_deficient || sol.rank_deficient;
    coeff = std::move(sol.coeff);
    bool any = false;
    for (int pos = static_cast<int>(remaining.size()) - 1; pos >= 0; --pos) {
      const int user = remaining[pos];
      for (int c = 0; c < d; ++c) est[c] = coeff[static_cast<std::size_t>(pos) * d + c] / gain;
      if (!codec.decode(user, est).certified) continue;
      const auto s_true = codec.truth().block(user, d);
      std::copy(s_true.begin(), s_true.end(),
                out.estimates.data() + static_cast<std::size_t>(user) * d);
      D.apply_block_acc(user, s_true, cplx{-gain, 0.0}, y_w);
      out.cancelled.push_back(user);
      remaining.erase(remaining.begin() + pos);
      any = true;
    }
    if (!any || remaining.empty()) break;
  }

  out.support = remaining;
  for (std::size_t a = 0; a < remaining.size(); ++a) {
    cplx* dst = out.estimates.data() + static_cast<std::size_t>(remaining[a]) * d;
    for (int c = 0; c < d; ++c) dst[c] = coeff[a * d + c] / gain;
  }
  return out;
}

RecoveryResult run_algorithm(Algorithm a, const BlockDictionary& D, const SystemConfig& cfg,
                             const FrameInstance& frame) {
  switch (a) {
    case Algorithm::bomp:
      return bomp(D, cfg, frame.received);
    case Algorithm::icbomp: {
      GenieCodec codec(cfg, frame);
      return icbomp(D, cfg, frame.received, codec);
    }
    case Algorithm::oracle_ls:
      return oracle_ls(D, cfg, frame.received, frame.support);
    case Algorithm::oracle_ic_mmse: {
      GenieCodec codec(cfg, frame);
      return oracle_ic_mmse(D, cfg, frame.received, codec);
    }
  }
  throw std::logic_error("run_algorithm: bad tag");
}

}  // namespace spmux
