#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace spmux {

// Deterministic stream generator. Every random quantity in the project comes
// from one of these, seeded explicitly; nothing reads global state, so any
// draw sequence can be reproduced from (seed, draw order) alone.
//
// The algorithm is pinned here so it can be re-derived independently:
//
//   next_u64():  state += 0x9E3779B97F4A7C15
//                z = state
//                z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                return z ^ (z >> 31)                        (SplitMix64)
//
//   derive(seed, tag) = next_u64 output of a stream whose state is
//                       seed ^ (0xD1B54A32D192ED03 * (tag + 1))
//   fork(tag) seeds a child with derive(seed, tag); substream(master, {a,b,c})
//   folds derive left to right. Children depend only on the parent's seed,
//   never on how much of the parent was consumed.
//
//   next_unit_co() = (next_u64() >> 11) * 2^-53               in [0,1)
//   next_unit_oc() = ((next_u64() >> 11) + 1) * 2^-53         in (0,1]
//   next_cgauss():  u1 = next_unit_oc(), u2 = next_unit_co()
//                   r = sqrt(-ln u1), return r*cos(2 pi u2) + i r*sin(2 pi u2)
//                   (circular complex normal, E|z|^2 = 1)
//   next_below(n) = (next_u64() * n) >> 64 using 128-bit arithmetic
//   next_bit()    = next_u64() & 1
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);
  static RngStream substream(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

  RngStream fork(std::uint64_t tag) const { return RngStream(derive(seed_, tag)); }

  std::uint64_t next_u64();
  double next_unit_co();
  double next_unit_oc();
  std::complex<double> next_cgauss();
  std::uint64_t next_below(std::uint64_t n);
  int next_bit() { return static_cast<int>(next_u64() & 1u); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace spmux
