#include "spmux/rng.hpp"

#include <cmath>

namespace spmux {

namespace {
inline std::uint64_t splitmix_from(std::uint64_t state) {
  std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t RngStream::derive(std::uint64_t seed, std::uint64_t tag) {
  return splitmix_from(seed ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
}

RngStream RngStream::substream(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = master;
  for (std::uint64_t t : tags) s = derive(s, t);
  return RngStream(s);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t out = splitmix_from(state_);
  state_ += 0x9E3779B97F4A7C15ULL;
  return out;
}

double RngStream::next_unit_co() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_unit_oc() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::complex<double> RngStream::next_cgauss() {
  const double u1 = next_unit_oc();
  const double u2 = next_unit_co();
  const double r = std::sqrt(-std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

}  // namespace spmux
