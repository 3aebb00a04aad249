#pragma once

#include <array>
#include <string>

#include "ofdm/baseline/demapper.hpp"
#include "ofdm/numgrad/checkpoint.hpp"
#include "ofdm/numgrad/conv.hpp"

namespace ofdm {

enum class RxNormalization { none, layer };
RxNormalization parse_rx_normalization(const std::string& s);
std::string to_string(RxNormalization n);

struct NeuralRxConfig {
  int width = 32;
  int bits_per_symbol = 4;
  int kernel = 3;
  ng::Dilation input_dilation{1, 1};
  std::array<ng::Dilation, 4> block_dilations{{{3, 1}, {6, 2}, {6, 2}, {3, 1}}};
  // layer: channel-wise layer norm before every ReLU.
  RxNormalization normalization = RxNormalization::none;

  void validate() const;
  bool operator==(const NeuralRxConfig& o) const;
};

// Real/imaginary stacking: [n_S, n_T] complex -> [n_S, n_T, 2], and back.
ng::DiffArray c2r(const CMatrixXd& Z);
CMatrixXd r2c(const ng::DiffArray& x);

// Residual CNN receiver: separable input conv, four pre-activation residual
// blocks ([norm], ReLU, separable conv, [norm], ReLU, separable conv, skip),
// [norm], ReLU, and a 1x1 output conv producing m LLRs per resource element.
class NeuralReceiver {
 public:
  explicit NeuralReceiver(const NeuralRxConfig& config, std::uint64_t seed = 1);

  const NeuralRxConfig& config() const { return config_; }
  ng::ParameterList& parameters() { return params_; }
  const ng::ParameterList& parameters() const { return params_; }
  std::size_t parameter_count() const;

  // [B, n_S, n_T, 2] (or rank 3) -> [B, n_S, n_T, m]; positive favors bit 1.
  ng::DiffArray forward(const ng::DiffArray& z) const;
  // Single-frame inference with pilot REs marked undefined.
  LlrTensor infer(const CMatrixXd& Z, const BoolArray& pilot_mask) const;

  std::string metadata_json() const;
  static NeuralRxConfig config_from_metadata(const std::string& json);
  void save(const std::string& path) const;
  static NeuralReceiver load(const std::string& path);

 private:
  const ng::DiffArray& param(std::size_t i) const { return params_[i].array; }
  NeuralRxConfig config_;
  ng::ParameterList params_;
};

}  // namespace ofdm
