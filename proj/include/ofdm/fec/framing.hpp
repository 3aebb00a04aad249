#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ofdm/types.hpp"

namespace ofdm {

// Bit layout of one OFDM frame: `codewords` LDPC codewords, then random
// padding up to n_D * m bits, then a frame-wide interleaver.
struct FrameLayout {
  int codewords = 3;
  int codeword_length = 1024;
  int data_res = 0;  // n_D
  int bits_per_symbol = 4;
  std::uint64_t interleaver_seed = 0;
  std::vector<int> permutation;  // transmitted position i carries payload bit permutation[i]

  int frame_bits() const { return data_res * bits_per_symbol; }
  int coded_bits() const { return codewords * codeword_length; }
  int padding_bits() const { return frame_bits() - coded_bits(); }
};

// ConfigError when the codewords do not fit.
FrameLayout make_frame_layout(int data_res, int bits_per_symbol, int codeword_length = 1024, int codewords = 3,
                              std::uint64_t interleaver_seed = 0x1eaf);

// Concatenate codewords, append padding drawn from rng, interleave.
Bits frame_pack(std::span<const Bits> codewords, const FrameLayout& layout, Rng& rng);

// Deinterleave and split; padding LLRs are dropped.
std::vector<Eigen::ArrayXd> frame_unpack(std::span<const double> llrs, const FrameLayout& layout);

}  // namespace ofdm
