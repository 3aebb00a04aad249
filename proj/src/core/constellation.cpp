#include "ofdm/core/constellation.hpp"

#include <cmath>
#include <string>

#include "ofdm/errors.hpp"

namespace ofdm {

void Constellation::validate() const {
  if (bits_per_symbol < 1 || bits_per_symbol > 16) {
    throw ConfigError("bits per symbol must be in [1,16], got " + std::to_string(bits_per_symbol));
  }
  if (points.size() != (Eigen::Index(1) << bits_per_symbol)) {
    throw ConfigError("constellation has " + std::to_string(points.size()) + " points, expected 2^" +
                      std::to_string(bits_per_symbol));
  }
}

Constellation Constellation::qam(int bits_per_symbol) {
  if (bits_per_symbol == 1) {
    Constellation c;
    c.bits_per_symbol = 1;
    c.points.resize(2);
    c.points << -1.0, 1.0;
    return c;
  }
  if (bits_per_symbol < 2 || bits_per_symbol % 2 != 0) {
    throw ConfigError("square QAM needs an even bit count, got " + std::to_string(bits_per_symbol));
  }
  const int half = bits_per_symbol / 2;
  const int side = 1 << half;
  // Binary-reflected Gray code along each axis: level index l carries label l ^ (l >> 1).
  std::vector<double> level_for_label(side);
  for (int l = 0; l < side; ++l) level_for_label[l ^ (l >> 1)] = 2.0 * l - (side - 1);
  Constellation c;
  c.bits_per_symbol = bits_per_symbol;
  c.points.resize(side * side);
  for (int k = 0; k < side * side; ++k) {
    const int in_phase = k >> half, quadrature = k & (side - 1);
    c.points[k] = cd(level_for_label[in_phase], level_for_label[quadrature]);
  }
  c.points /= std::sqrt(c.average_power());
  return c;
}

std::vector<int> bits_to_indices(std::span<const std::uint8_t> bits, int bits_per_symbol) {
  if (bits.size() % static_cast<std::size_t>(bits_per_symbol) != 0) {
    throw ShapeError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                     std::to_string(bits_per_symbol));
  }
  std::vector<int> idx(bits.size() / bits_per_symbol);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    int v = 0;
    for (int b = 0; b < bits_per_symbol; ++b) v = (v << 1) | (bits[s * bits_per_symbol + b] & 1);
    idx[s] = v;
  }
  return idx;
}

Bits indices_to_bits(std::span<const int> indices, int bits_per_symbol) {
  Bits bits(indices.size() * bits_per_symbol);
  for (std::size_t s = 0; s < indices.size(); ++s)
    for (int b = 0; b < bits_per_symbol; ++b)
      bits[s * bits_per_symbol + b] = static_cast<std::uint8_t>((indices[s] >> (bits_per_symbol - 1 - b)) & 1);
  return bits;
}

}  // namespace ofdm
