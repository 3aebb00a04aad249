#pragma once

#include <span>

#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm {

// Total binary cross-entropy in bits per frame:
//   L = (1/B) sum_b sum_{k in data} sum_i log2(1 + exp(-(2 b_ki - 1) llr_ki)).
// llrs: [B, n_S, n_T, m] (positive favors 1). bits: per frame n_D * m bits
// in the order of data_indices (vec index, symbol-major), m per RE.
ng::DiffArray total_bce(const ng::DiffArray& llrs, std::span<const std::uint8_t> bits,
                        std::span<const int> data_indices);

}  // namespace ofdm
