#include "ofdm/baseline/demapper.hpp"

#include <cmath>
#include <limits>

#include "ofdm/errors.hpp"

namespace ofdm {

Eigen::ArrayXd LlrTensor::data_llrs() const {
  Eigen::ArrayXd out(defined.count() * bits_per_symbol);
  Eigen::Index w = 0;
  for (int q = 0; q < n_symbols; ++q)
    for (int s = 0; s < n_subcarriers; ++s) {
      if (!defined(s, q)) continue;
      for (int i = 0; i < bits_per_symbol; ++i) out[w++] = at(s, q, i);
    }
  return out;
}

void demap_symbol(cd z, cd h, double variance, const Constellation& c, double* llr) {
  constexpr int kMaxPoints = 1 << 12;
  const int M = c.size();
  const int m = c.bits_per_symbol;
  if (M > kMaxPoints) throw ConfigError("demapper: constellation too large");
  double metric[kMaxPoints];
  for (int k = 0; k < M; ++k) metric[k] = -std::norm(z - h * c.points[k]) / variance;
  for (int i = 0; i < m; ++i) {
    double mx[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int k = 0; k < M; ++k) mx[c.bit(k, i)] = std::max(mx[c.bit(k, i)], metric[k]);
    double acc[2] = {0.0, 0.0};
    for (int k = 0; k < M; ++k) {
      const int b = c.bit(k, i);
      acc[b] += std::exp(metric[k] - mx[b]);
    }
    llr[i] = (mx[1] + std::log(acc[1])) - (mx[0] + std::log(acc[0]));
  }
}

LlrTensor gaussian_demap(const CMatrixXd& Z, const CVectorXd& g_hat, const Eigen::VectorXd& error_variance,
                         double noise_variance, const Constellation& constellation, const PilotPattern& pattern) {
  const int nS = static_cast<int>(Z.rows());
  const int nT = static_cast<int>(Z.cols());
  if (g_hat.size() != Z.size() || error_variance.size() != Z.size() || pattern.values.rows() != nS ||
      pattern.values.cols() != nT) {
    throw ShapeError("demapper: Z, channel estimate, error variance and pilot pattern sizes disagree");
  }
  const int m = constellation.bits_per_symbol;
  LlrTensor out;
  out.n_subcarriers = nS;
  out.n_symbols = nT;
  out.bits_per_symbol = m;
  out.values = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(nS) * nT * m);
  out.defined = pattern.values.array().abs() == 0.0;
  for (int q = 0; q < nT; ++q)
    for (int s = 0; s < nS; ++s) {
      if (!out.defined(s, q)) continue;
      const int k = q * nS + s;
      const double var = error_variance[k] + noise_variance;
      if (!(var > 0.0)) {
        throw NumericalError("demapper: effective noise variance " + std::to_string(var) + " at RE " +
                             std::to_string(k) + " is not positive");
      }
      demap_symbol(Z(s, q), g_hat[k], var, constellation, &out.at(s, q, 0));
    }
  return out;
}

}  // namespace ofdm
