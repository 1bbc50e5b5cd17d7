#include <memory>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spmux/dictionary.hpp"

using namespace spmux;

namespace {

struct Fixture {
  SystemConfig cfg;
  std::shared_ptr<const PrecoderSet> P;
  std::shared_ptr<const ChannelSet> H;
  BlockDictionary D;
};

// Channels scaled to ||h_n||^2 = M when asked: several checks here compare
// rankings or self-energies, which assume comparable column norms rather than
// a faded draw.
Fixture make(std::uint64_t seed, int M, int N, int d, int T, bool orth,
             bool normalize_channels) {
  SystemConfig cfg;
  cfg.M = M;
  cfg.N = N;
  cfg.N_a = std::min(2, N);
  cfg.d = d;
  cfg.T = T;
  cfg.K = 2;
  cfg.precoding_orthogonal = orth;
  RngStream trial(seed);
  RngStream ch = trial.fork(kTagChannel);
  RngStream pr = trial.fork(kTagPrecoder);
  ChannelSet Hs = generate_channels(cfg, ch);
  if (normalize_channels) {
    for (int n = 0; n < N; ++n) {
      const double s = std::sqrt(M / Hs.norm2(n));
      for (int m = 0; m < M; ++m) Hs.h[std::size_t(n) * M + m] *= s;
    }
  }
  auto Hp = std::make_shared<const ChannelSet>(std::move(Hs));
  auto Pp = generate_precoders(cfg, pr);
  return {cfg, Pp, Hp, BlockDictionary(Pp, Hp)};
}

oracle::Mat explicit_block(const Fixture& f, int n) {
  return oracle::kron_block(f.P->user(n).data(), f.cfg.T, f.cfg.d, f.H->user(n).data(),
                            f.cfg.M);
}

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
  oracle::SplitMix s{seed};
  std::vector<cplx> v(n);
  for (auto& x : v) x = oracle::cgauss(s);
  return v;
}

}  // namespace

TEST_SUITE("dictionary") {

TEST_CASE("correlating the zero vector gives zero") {
  auto f = make(3, 2, 4, 2, 6, true, false);
  std::vector<cplx> r(f.D.rows());
  std::vector<cplx> out(f.cfg.d, cplx{1.0, 1.0});
  f.D.correlate(r, 1, out);
  for (const cplx& v : out) CHECK(v == cplx{});
}

TEST_CASE("correlation matches the explicit block adjoint") {
  auto f = make(11, 2, 4, 2, 6, true, false);
  const auto r = random_vec(f.D.rows(), 500);
  for (int j = 0; j < f.cfg.N; ++j) {
    std::vector<cplx> got(f.cfg.d);
    f.D.correlate(r, j, got);
    const auto want = oracle::matvec(oracle::adjoint(explicit_block(f, j)), r);
    CHECK(oracle::max_abs_diff(got, want) < 1e-12);
  }
}

TEST_CASE("apply and correlate are adjoint") {
  auto f = make(17, 3, 5, 2, 7, false, false);
  const auto r = random_vec(f.D.rows(), 71);
  const auto s = random_vec(std::size_t(f.cfg.d), 72);
  for (int j = 0; j < f.cfg.N; ++j) {
    std::vector<cplx> Bs(f.D.rows());
    f.D.apply_block_acc(j, s, cplx{1.0}, Bs);
    std::vector<cplx> Bhr(f.cfg.d);
    f.D.correlate(r, j, Bhr);
    cplx lhs{}, rhs{};
    for (std::size_t i = 0; i < Bs.size(); ++i) lhs += std::conj(Bs[i]) * r[i];
    for (std::size_t i = 0; i < Bhr.size(); ++i) rhs += std::conj(s[i]) * Bhr[i];
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("correlate_all equals per-block correlation and honors skips") {
  auto f = make(23, 2, 5, 2, 6, true, false);
  const auto r = random_vec(f.D.rows(), 81);
  std::vector<cplx> all(std::size_t(f.cfg.N) * f.cfg.d);
  std::vector<bool> skip(std::size_t(f.cfg.N), false);
  skip[2] = true;
  f.D.correlate_all(r, all, &skip);
  for (int j = 0; j < f.cfg.N; ++j) {
    std::vector<cplx> one(f.cfg.d);
    f.D.correlate(r, j, one);
    for (int c = 0; c < f.cfg.d; ++c) {
      const cplx got = all[std::size_t(j) * f.cfg.d + c];
      if (j == 2)
        CHECK(got == cplx{});
      else
        CHECK(std::abs(got - one[std::size_t(c)]) < 1e-13);
    }
  }
}

TEST_CASE("multi-block apply is the sum of single applies") {
  auto f = make(29, 2, 4, 2, 6, true, false);
  const auto s = random_vec(std::size_t(f.cfg.N) * f.cfg.d, 91);
  const std::vector<int> blocks{0, 2, 3};
  const cplx scale{0.6, -1.1};

  std::vector<cplx> got(f.D.rows());
  f.D.apply_blocks_acc(blocks, s, scale, got);

  std::vector<cplx> want(f.D.rows());
  for (int j : blocks)
    f.D.apply_block_acc(j, {s.data() + std::size_t(j) * f.cfg.d, std::size_t(f.cfg.d)},
                        scale, want);
  CHECK(oracle::max_abs_diff(got, want) < 1e-12);
}

TEST_CASE("a lone transmitter wins the correlation ranking") {
  // Unit-energy columns; with orthonormal spreading the true block's
  // correlation strictly dominates every rival almost surely.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto f = make(1000 + seed, 4, 8, 2, 16, true, true);
    const auto s = random_vec(std::size_t(f.cfg.d), 2000 + seed);
    const int truth = int(seed % f.cfg.N);
    std::vector<cplx> y(f.D.rows());
    f.D.apply_block_acc(truth, s, cplx{1.0}, y);

    int best = -1;
    double best_e = -1.0;
    for (int j = 0; j < f.cfg.N; ++j) {
      std::vector<cplx> c(f.cfg.d);
      f.D.correlate(y, j, c);
      double e = 0.0;
      for (const cplx& v : c) e += std::norm(v);
      if (e > best_e) {
        best_e = e;
        best = j;
      }
    }
    CHECK(best == truth);
  }
}

TEST_CASE("channel inners and gram norms factor as advertised") {
  auto f = make(37, 3, 5, 2, 8, false, false);
  for (int i = 0; i < f.cfg.N; ++i)
    for (int j = 0; j < f.cfg.N; ++j) {
      cplx want{};
      for (int m = 0; m < f.cfg.M; ++m)
        want += std::conj(f.H->user(i)[std::size_t(m)]) * f.H->user(j)[std::size_t(m)];
      want /= double(f.cfg.M);
      CHECK(std::abs(f.D.channel_inner(i, j) - want) < 1e-14);
    }

  for (int i = 0; i < f.cfg.N; ++i)
    for (int j = 0; j < f.cfg.N; ++j) {
      const oracle::Mat G =
          oracle::mul(oracle::adjoint(explicit_block(f, i)), explicit_block(f, j));
      // Both sides are power iterations; agreement is limited by the
      // eigenvalue gap, not arithmetic.
      CHECK(f.D.block_gram_norm(i, j) ==
            doctest::Approx(oracle::spectral_norm(G)).epsilon(1e-6));
    }
}

TEST_CASE("self-gram energies sit inside the sub-coherence band") {
  // With unit-energy columns, ||B_j^H B_j|| is pinched between
  // 1 -/+ (d-1) * (within-block column coherence).
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const bool orth = (seed % 2) == 0;
    auto f = make(4000 + seed, 2, 4, 3, 9, orth, true);
    for (int j = 0; j < f.cfg.N; ++j) {
      const double nu_j =
          f.H->norm2(j) / f.cfg.M * f.P->column_coherence(j);
      const double g = f.D.block_gram_norm(j, j);
      CHECK(g <= 1.0 + (f.cfg.d - 1) * nu_j + 1e-9);
      CHECK(g >= 1.0 - (f.cfg.d - 1) * nu_j - 1e-9);
      if (orth) CHECK(g == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("materialized blocks equal the kronecker construction") {
  auto f = make(41, 2, 4, 2, 6, true, false);
  const std::vector<int> blocks{1, 3};
  const auto A = f.D.materialize(blocks);
  REQUIRE(A.size() == f.D.rows() * blocks.size() * std::size_t(f.cfg.d));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const oracle::Mat B = explicit_block(f, blocks[b]);
    for (int c = 0; c < f.cfg.d; ++c)
      for (std::size_t i = 0; i < f.D.rows(); ++i)
        CHECK(std::abs(A[i + (b * f.cfg.d + std::size_t(c)) * f.D.rows()] -
                       B.at(int(i), c)) < 1e-14);
  }

  CHECK_THROWS_AS((void)f.D.materialize(blocks, 10), std::length_error);
}

TEST_CASE("dense gram assembles without touching the tall operator") {
  auto f = make(43, 2, 5, 2, 7, false, false);
  const std::vector<int> blocks{0, 2, 4};
  const int n = int(blocks.size()) * f.cfg.d;
  const auto G = f.D.block_gram_dense(blocks);
  REQUIRE(int(G.size()) == n * n);

  const auto Araw = f.D.materialize(blocks);
  oracle::Mat A(int(f.D.rows()), n);
  A.a = Araw;
  const oracle::Mat want = oracle::mul(oracle::adjoint(A), A);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(G[std::size_t(i) + std::size_t(j) * n] - want.at(i, j)) < 1e-10);
}

}  // TEST_SUITE
