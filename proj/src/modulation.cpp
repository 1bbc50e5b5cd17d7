#include "spmux/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace spmux {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

int bits_per_symbol(Modulation m) { return m == Modulation::qpsk ? 2 : 1; }

double min_symbol_distance(Modulation m) {
  return m == Modulation::qpsk ? std::sqrt(2.0) : 2.0;
}

std::vector<cplx> modulate(std::span<const std::uint8_t> bits, Modulation m) {
  const int bps = bits_per_symbol(m);
  if (bits.size() % bps != 0)
    throw std::invalid_argument("modulate: bit count not a multiple of bits per symbol");
  std::vector<cplx> out;
  out.reserve(bits.size() / bps);
  if (m == Modulation::bpsk) {
    for (std::uint8_t b : bits) out.emplace_back(b ? -1.0 : 1.0, 0.0);
  } else {
    for (std::size_t i = 0; i < bits.size(); i += 2) {
      const double re = bits[i] ? -kInvSqrt2 : kInvSqrt2;
      const double im = bits[i + 1] ? -kInvSqrt2 : kInvSqrt2;
      out.emplace_back(re, im);
    }
  }
  return out;
}

std::vector<std::uint8_t> demodulate(std::span<const cplx> symbols, Modulation m) {
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * bits_per_symbol(m));
  for (cplx v : symbols) {
    if (m == Modulation::bpsk) {
      out.push_back(v.real() < 0.0 ? 1 : 0);
    } else {
      out.push_back(v.real() < 0.0 ? 1 : 0);
      out.push_back(v.imag() < 0.0 ? 1 : 0);
    }
  }
  return out;
}

cplx slice_symbol(cplx v, Modulation m) {
  if (m == Modulation::bpsk) return {v.real() < 0.0 ? -1.0 : 1.0, 0.0};
  return {v.real() < 0.0 ? -kInvSqrt2 : kInvSqrt2,
          v.imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2};
}

}  // namespace spmux
