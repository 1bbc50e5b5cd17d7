#include <memory>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spmux/codec.hpp"

using namespace spmux;

namespace {

struct World {
  SystemConfig cfg;
  std::shared_ptr<const PrecoderSet> P;
  std::shared_ptr<const ChannelSet> H;
  FrameInstance frame;
};

World make(std::uint64_t seed, int d = 4, int msg_min = 0, int msg_max = 0) {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.N = 4;
  cfg.N_a = 2;
  cfg.d = d;
  cfg.T = 2 * d;
  cfg.K = 2;
  cfg.msg_len_min = msg_min;
  cfg.msg_len_max = msg_max;
  RngStream trial(seed);
  RngStream ch = trial.fork(kTagChannel);
  RngStream pr = trial.fork(kTagPrecoder);
  auto Hp = std::make_shared<const ChannelSet>(generate_channels(cfg, ch));
  auto Pp = generate_precoders(cfg, pr);
  FrameInstance f = synthesize_frame(cfg, *Pp, *Hp, trial);
  return {cfg, Pp, Hp, std::move(f)};
}

// Exact symbols of one active user's block, ready to perturb.
std::vector<cplx> clean_estimate(const World& w, int user) {
  const auto b = w.frame.block(user, w.cfg.d);
  return {b.begin(), b.end()};
}

// Flip one payload bit of a QPSK symbol by negating the matching coordinate.
void flip_bit(std::vector<cplx>& est, int symbol, bool imag_part) {
  if (imag_part)
    est[std::size_t(symbol)] = {est[std::size_t(symbol)].real(), -est[std::size_t(symbol)].imag()};
  else
    est[std::size_t(symbol)] = {-est[std::size_t(symbol)].real(), est[std::size_t(symbol)].imag()};
}

}  // namespace

TEST_SUITE("codec") {

TEST_CASE("clean payloads certify with zero errors") {
  World w = make(1);
  w.cfg.t_c = 0;
  const GenieCodec codec(w.cfg, w.frame);
  for (int user : w.frame.support) {
    const auto est = clean_estimate(w, user);
    const auto out = codec.decode(user, est);
    CHECK(out.certified);
    CHECK(out.bit_errors == 0);
  }
}

TEST_CASE("certification tracks the correction budget exactly") {
  World w = make(2);
  const int user = w.frame.support[0];
  for (int flips = 0; flips <= 3; ++flips) {
    auto est = clean_estimate(w, user);
    for (int i = 0; i < flips; ++i) flip_bit(est, i, i % 2 == 1);
    for (int t_c = 0; t_c <= 4; ++t_c) {
      SystemConfig cfg = w.cfg;
      cfg.t_c = t_c;
      const GenieCodec codec(cfg, w.frame);
      const auto out = codec.decode(user, est);
      CHECK(out.bit_errors == flips);
      CHECK(out.certified == (flips <= t_c));
    }
  }
}

TEST_CASE("certification is monotone in the budget") {
  World w = make(3);
  const int user = w.frame.support[1];
  auto est = clean_estimate(w, user);
  flip_bit(est, 0, false);
  flip_bit(est, 1, true);
  bool prev = false;
  for (int t_c = 0; t_c <= 5; ++t_c) {
    SystemConfig cfg = w.cfg;
    cfg.t_c = t_c;
    const auto out = GenieCodec(cfg, w.frame).decode(user, est);
    CHECK((out.certified || !prev));  // once certified, stays certified
    prev = out.certified;
  }
  CHECK(prev);
}

TEST_CASE("sentinel budgets") {
  World w = make(4);
  const int user = w.frame.support[0];

  SystemConfig never = w.cfg;
  never.t_c = -1;
  const auto clean = clean_estimate(w, user);
  auto out = GenieCodec(never, w.frame).decode(user, clean);
  CHECK_FALSE(out.certified);
  CHECK(out.bit_errors == 0);

  SystemConfig always = w.cfg;
  always.t_c = kAlwaysCertify;
  auto wrecked = clean;
  for (int i = 0; i < int(wrecked.size()); ++i) wrecked[std::size_t(i)] = -wrecked[std::size_t(i)];
  out = GenieCodec(always, w.frame).decode(user, wrecked);
  CHECK(out.certified);
  CHECK(out.bit_errors == 2 * w.cfg.d);  // every bit of a full-length block
}

TEST_CASE("users outside the support never certify") {
  World w = make(5);
  SystemConfig cfg = w.cfg;
  cfg.t_c = kAlwaysCertify;
  const GenieCodec codec(cfg, w.frame);
  for (int n = 0; n < w.cfg.N; ++n) {
    if (w.frame.is_active(n)) continue;
    const std::vector<cplx> est(std::size_t(w.cfg.d), cplx{1.0, 0.0});
    const auto out = codec.decode(n, est);
    CHECK_FALSE(out.certified);
    CHECK(out.bit_errors == -1);
  }
}

TEST_CASE("padding beyond the message length is ignored") {
  World w = make(6, 4, 2, 2);  // 2 payload symbols, 2 padding
  SystemConfig cfg = w.cfg;
  cfg.t_c = 0;
  const GenieCodec codec(cfg, w.frame);
  const int user = w.frame.support[0];
  auto est = clean_estimate(w, user);
  est[2] = {9.0, -9.0};
  est[3] = {-3.0, 0.2};
  const auto out = codec.decode(user, est);
  CHECK(out.certified);
  CHECK(out.bit_errors == 0);

  auto est2 = clean_estimate(w, user);
  flip_bit(est2, 1, true);  // inside the payload
  const auto out2 = codec.decode(user, est2);
  CHECK_FALSE(out2.certified);
  CHECK(out2.bit_errors == 1);
}

TEST_CASE("decoding is a pure function of its inputs") {
  World w = make(7);
  const int user = w.frame.support[0];
  auto est = clean_estimate(w, user);
  flip_bit(est, 2, false);
  const GenieCodec codec(w.cfg, w.frame);
  const auto a = codec.decode(user, est);
  const auto b = codec.decode(user, est);
  CHECK(a.certified == b.certified);
  CHECK(a.bit_errors == b.bit_errors);
}

TEST_CASE("noisy but sliceable estimates still certify") {
  World w = make(8);
  SystemConfig cfg = w.cfg;
  cfg.t_c = 0;
  const GenieCodec codec(cfg, w.frame);
  const int user = w.frame.support[1];
  auto est = clean_estimate(w, user);
  oracle::SplitMix s{99};
  const double r = 0.999 * min_symbol_distance(cfg.modulation) / 2.0;
  for (auto& x : est) {
    const double ph = 2.0 * oracle::kPi * oracle::unit_co(s);
    x += r * cplx{std::cos(ph), std::sin(ph)};
  }
  const auto out = codec.decode(user, est);
  CHECK(out.certified);
  CHECK(out.bit_errors == 0);
}

}  // TEST_SUITE
