#pragma once

// Central finite-difference gradient oracle for numgrad tests. Independent of
// the backward implementation: it only evaluates forward passes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "ofdm/numgrad/diff_array.hpp"

namespace testing {

inline Eigen::ArrayXd random_array(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::ArrayXd a(static_cast<Eigen::Index>(n));
  for (auto& v : a) v = u(rng);
  return a;
}

// Numerical gradient of `loss` (scalar function of the parameter leaf) at its
// current values, step h.
inline Eigen::ArrayXd numeric_gradient(ofdm::ng::DiffArray param, const std::function<double()>& loss,
                                       double h = 1e-6) {
  Eigen::ArrayXd& v = param.leaf_values();
  Eigen::ArrayXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double keep = v[i];
    v[i] = keep + h;
    const double up = loss();
    v[i] = keep - h;
    const double down = loss();
    v[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Max relative error with a floor on the denominator so that near-zero
// components are compared absolutely.
inline double max_relative_error(const Eigen::ArrayXd& analytic, const Eigen::ArrayXd& numeric,
                                 double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace testing
