#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "oracles.hpp"
#include "spmux/rng.hpp"

using spmux::RngStream;

TEST_SUITE("rng") {

TEST_CASE("u64 stream matches the documented recurrence") {
  for (std::uint64_t seed : {0ull, 1ull, 0xDEADBEEFull, 0xFFFFFFFFFFFFFFFFull}) {
    RngStream r(seed);
    oracle::SplitMix s{seed};
    for (int i = 0; i < 200; ++i) CHECK(r.next_u64() == s.next());
  }
}

TEST_CASE("derive matches the documented mix") {
  for (std::uint64_t seed : {0ull, 7ull, 0x123456789ABCULL}) {
    for (std::uint64_t tag : {0ull, 1ull, 2ull, 63ull, 0xFFFFFFFFull}) {
      CHECK(RngStream::derive(seed, tag) == oracle::derive(seed, tag));
    }
  }
}

TEST_CASE("substream folds tags left to right") {
  const std::uint64_t m = 0xABCDEF01;
  const std::uint64_t want = oracle::derive(oracle::derive(oracle::derive(m, 5), 2), 19);
  CHECK(RngStream::substream(m, {5, 2, 19}).seed() == want);
  CHECK(RngStream::substream(m, {5}).seed() == oracle::derive(m, 5));
}

TEST_CASE("forks depend on the parent's seed, not its position") {
  RngStream fresh(42);
  RngStream consumed(42);
  for (int i = 0; i < 17; ++i) consumed.next_u64();
  RngStream a = fresh.fork(7);
  RngStream b = consumed.fork(7);
  CHECK(a.seed() == b.seed());
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());

  // Distinct tags give streams that disagree immediately.
  CHECK(fresh.fork(7).next_u64() != fresh.fork(8).next_u64());
}

TEST_CASE("unit draws stay inside their half-open ranges") {
  RngStream r(99);
  for (int i = 0; i < 100000; ++i) {
    const double co = r.next_unit_co();
    CHECK(co >= 0.0);
    CHECK(co < 1.0);
  }
  RngStream r2(99);
  for (int i = 0; i < 100000; ++i) {
    const double oc = r2.next_unit_oc();
    CHECK(oc > 0.0);
    CHECK(oc <= 1.0);
  }
}

TEST_CASE("complex gaussian matches the documented transform") {
  RngStream r(0xC0FFEE);
  oracle::SplitMix s{0xC0FFEE};
  for (int i = 0; i < 1000; ++i) {
    const auto got = r.next_cgauss();
    const auto want = oracle::cgauss(s);
    CHECK(std::abs(got - want) < 1e-14);
  }
}

TEST_CASE("complex gaussian first and second moments") {
  RngStream r(2024);
  const int n = 100000;
  std::complex<double> mean{};
  double e2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = r.next_cgauss();
    mean += z;
    e2 += std::norm(z);
  }
  mean /= double(n);
  e2 /= double(n);
  CHECK(std::abs(mean) < 0.02);
  CHECK(e2 > 0.95);
  CHECK(e2 < 1.05);
}

TEST_CASE("bounded draws are in range and near uniform") {
  RngStream r(31337);
  const std::uint64_t n = 10;
  int counts[10] = {};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = r.next_below(n);
    REQUIRE(v < n);
    ++counts[v];
  }
  for (int c : counts) {
    CHECK(c > draws / 10 * 0.95);
    CHECK(c < draws / 10 * 1.05);
  }

  RngStream r2(5);
  for (int i = 0; i < 1000; ++i) CHECK(r2.next_below(1) == 0);
}

TEST_CASE("bits are balanced") {
  RngStream r(808);
  int ones = 0;
  for (int i = 0; i < 100000; ++i) {
    const int b = r.next_bit();
    REQUIRE((b == 0 || b == 1));
    ones += b;
  }
  CHECK(ones > 49000);
  CHECK(ones < 51000);
}

}  // TEST_SUITE
