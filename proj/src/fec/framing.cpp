#include "ofdm/fec/framing.hpp"

#include <algorithm>
#include <numeric>

#include "ofdm/errors.hpp"

namespace ofdm {

FrameLayout make_frame_layout(int data_res, int bits_per_symbol, int codeword_length, int codewords,
                              std::uint64_t interleaver_seed) {
  FrameLayout l;
  l.codewords = codewords;
  l.codeword_length = codeword_length;
  l.data_res = data_res;
  l.bits_per_symbol = bits_per_symbol;
  l.interleaver_seed = interleaver_seed;
  if (data_res < 1 || bits_per_symbol < 1 || codeword_length < 1 || codewords < 1) {
    throw ConfigError("frame layout: all sizes must be positive");
  }
  if (l.padding_bits() < 0) {
    throw ConfigError("frame layout: " + std::to_string(codewords) + " codewords of " +
                      std::to_string(codeword_length) + " bits do not fit in " + std::to_string(data_res) +
                      " data REs x " + std::to_string(bits_per_symbol) + " bits");
  }
  l.permutation.resize(static_cast<std::size_t>(l.frame_bits()));
  std::iota(l.permutation.begin(), l.permutation.end(), 0);
  Rng rng(interleaver_seed);
  std::shuffle(l.permutation.begin(), l.permutation.end(), rng);
  return l;
}

Bits frame_pack(std::span<const Bits> codewords, const FrameLayout& layout, Rng& rng) {
  if (static_cast<int>(codewords.size()) != layout.codewords) throw ShapeError("frame_pack: wrong number of codewords");
  Bits payload;
  payload.reserve(static_cast<std::size_t>(layout.frame_bits()));
  for (const auto& cw : codewords) {
    if (static_cast<int>(cw.size()) != layout.codeword_length) throw ShapeError("frame_pack: codeword has wrong length");
    payload.insert(payload.end(), cw.begin(), cw.end());
  }
  std::uniform_int_distribution<int> bit(0, 1);
  for (int i = 0; i < layout.padding_bits(); ++i) payload.push_back(static_cast<std::uint8_t>(bit(rng)));
  Bits out(payload.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = payload[layout.permutation[i]];
  return out;
}

std::vector<Eigen::ArrayXd> frame_unpack(std::span<const double> llrs, const FrameLayout& layout) {
  if (static_cast<int>(llrs.size()) != layout.frame_bits()) {
    throw ShapeError("frame_unpack: expected " + std::to_string(layout.frame_bits()) + " LLRs, got " +
                     std::to_string(llrs.size()));
  }
  Eigen::ArrayXd payload(layout.frame_bits());
  for (std::size_t i = 0; i < llrs.size(); ++i) payload[layout.permutation[i]] = llrs[i];
  std::vector<Eigen::ArrayXd> out;
  for (int c = 0; c < layout.codewords; ++c)
    out.emplace_back(payload.segment(static_cast<Eigen::Index>(c) * layout.codeword_length, layout.codeword_length));
  return out;
}

}  // namespace ofdm
