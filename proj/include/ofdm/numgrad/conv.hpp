#pragma once

#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm::ng {

struct Dilation {
  std::size_t rows = 1;  // along the first spatial axis (subcarriers)
  std::size_t cols = 1;  // along the second spatial axis (OFDM symbols)
};

// Activations are channels-last: [B, H, W, C] (a rank-3 [H, W, C] input is
// treated as B = 1 and returned rank-3). All convolutions zero-pad so the
// spatial dims are preserved.

// kernel: [KH, KW, C], KH and KW odd.
DiffArray depthwise_conv2d(const DiffArray& input, const DiffArray& kernel, Dilation dilation);

// kernel: [C_in, C_out].
DiffArray pointwise_conv2d(const DiffArray& input, const DiffArray& kernel);

// bias: [C], added to every spatial position.
DiffArray add_channel_bias(const DiffArray& input, const DiffArray& bias);

// Normalizes each spatial position over its channels, then applies the
// per-channel affine gamma * x_hat + beta. gamma, beta: [C].
DiffArray layer_norm_channels(const DiffArray& input, const DiffArray& gamma, const DiffArray& beta,
                              double eps = 1e-5);

// Depthwise dilated convolution followed by a 1x1 pointwise convolution.
DiffArray conv2d_separable(const DiffArray& input, const DiffArray& depthwise, const DiffArray& pointwise,
                           Dilation dilation);

}  // namespace ofdm::ng
