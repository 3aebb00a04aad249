#pragma once

#include <span>

#include "ofdm/types.hpp"

namespace ofdm {

// 2^m complex points; points[k] carries the m-bit label k, most significant
// bit first (bit 0 of a symbol is the MSB of its index).
struct Constellation {
  CVectorXd points;
  int bits_per_symbol = 0;

  int size() const { return static_cast<int>(points.size()); }
  int bit(int index, int position) const { return (index >> (bits_per_symbol - 1 - position)) & 1; }
  double average_power() const { return points.squaredNorm() / static_cast<double>(points.size()); }
  void validate() const;

  // Gray-labeled square QAM with unit average power (m even), or BPSK for m = 1.
  static Constellation qam(int bits_per_symbol);
};

// Consecutive m-bit groups (MSB first) to point indices.
std::vector<int> bits_to_indices(std::span<const std::uint8_t> bits, int bits_per_symbol);
Bits indices_to_bits(std::span<const int> indices, int bits_per_symbol);

}  // namespace ofdm
