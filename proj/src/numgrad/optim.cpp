#include "ofdm/numgrad/optim.hpp"

#include <cmath>

#include "ofdm/errors.hpp"

namespace ofdm::ng {

namespace {

void check_finite(const ParameterList& params) {
  for (const auto& p : params) {
    if (!p.array.has_grad()) continue;
    const Eigen::ArrayXd g = p.array.grad();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NumericalError("non-finite gradient in parameter '" + p.name + "' at flat index " + std::to_string(i));
      }
    }
  }
}

}  // namespace

AdamState make_adam_state(const ParameterList& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const auto& p : params) {
    s.first_moment.push_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(p.array.size())));
    s.second_moment.push_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(p.array.size())));
  }
  return s;
}

void adam_step(ParameterList& params, AdamState& state) {
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: state tracks " + std::to_string(state.first_moment.size()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.first_moment[i].size() != static_cast<Eigen::Index>(params[i].array.size())) {
      throw ShapeError("adam_step: moment shape mismatch for parameter '" + params[i].name + "'");
    }
  }
  check_finite(params);

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].array;
    if (!p.requires_grad()) continue;
    const Eigen::ArrayXd g = p.grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.square();
    p.leaf_values() -= c.learning_rate * (m / bc1) / ((v / bc2).sqrt() + c.epsilon);
  }
}

void sgd_step(ParameterList& params, double learning_rate) {
  check_finite(params);
  for (auto& p : params) {
    if (p.array.requires_grad()) p.array.leaf_values() -= learning_rate * p.array.grad();
  }
}

}  // namespace ofdm::ng
