#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace spmux {

using cplx = std::complex<double>;

enum class Modulation { bpsk, qpsk };

// Unit-energy constellations.
//   BPSK: bit 0 -> +1, bit 1 -> -1. Minimum distance 2.
//   QPSK (Gray): bits (b0,b1) -> ((1-2*b0) + i*(1-2*b1)) / sqrt(2).
//   b0 is the sign of the real part, b1 of the imaginary part; adjacent
//   symbols differ in one bit. Minimum distance sqrt(2).
int bits_per_symbol(Modulation m);
double min_symbol_distance(Modulation m);

// Throws std::invalid_argument if bits.size() is not a multiple of
// bits_per_symbol.
std::vector<cplx> modulate(std::span<const std::uint8_t> bits, Modulation m);

// Nearest-neighbour slicing. A coordinate exactly on a decision boundary
// (real or imaginary part 0) resolves to bit 0, i.e. the lexicographically
// smaller bit pattern.
std::vector<std::uint8_t> demodulate(std::span<const cplx> symbols, Modulation m);

cplx slice_symbol(cplx v, Modulation m);

}  // namespace spmux
