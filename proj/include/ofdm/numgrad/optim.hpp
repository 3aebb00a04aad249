#pragma once

#include <cstdint>
#include <vector>

#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm::ng {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Eigen::ArrayXd> first_moment;
  std::vector<Eigen::ArrayXd> second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(const ParameterList& params, AdamConfig config = {});

// Bias-corrected Adam update of every parameter from its accumulated gradient.
// All gradients are checked for finiteness before any parameter is touched;
// a NumericalError names the first offending parameter.
void adam_step(ParameterList& params, AdamState& state);

void sgd_step(ParameterList& params, double learning_rate);

}  // namespace ofdm::ng
