#pragma once

#include <cstdint>
#include <string>

#include "ofdm/types.hpp"

namespace ofdm {

// Time-varying tapped delay line: taps(t, i) is the coefficient of tap i at
// sample time t, i.e. y_t = sum_i x_{t-i} * taps(t, i) + w_t.
struct ChannelRealization {
  CMatrixXd taps;               // n_samples x n_taps
  double noise_variance = 0.0;  // total complex noise power per sample
  double speed_kmh = 0.0;
  std::uint64_t seed = 0;
  std::string generator = "unspecified";

  Eigen::Index n_samples() const { return taps.rows(); }
  Eigen::Index n_taps() const { return taps.cols(); }

  static ChannelRealization identity(Eigen::Index n_samples) {
    ChannelRealization r;
    r.taps = CMatrixXd::Ones(n_samples, 1);
    r.generator = "identity";
    return r;
  }
};

}  // namespace ofdm
