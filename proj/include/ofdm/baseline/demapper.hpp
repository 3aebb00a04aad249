#pragma once

#include "ofdm/baseline/pilots.hpp"
#include "ofdm/core/constellation.hpp"

namespace ofdm {

// Per-RE bit LLRs, row-major [n_S, n_T, m]. Positive favors bit = 1.
struct LlrTensor {
  int n_subcarriers = 0;
  int n_symbols = 0;
  int bits_per_symbol = 0;
  Eigen::ArrayXd values;
  BoolArray defined;  // n_S x n_T; false on pilot REs

  double at(int s, int q, int i) const { return values[(static_cast<Eigen::Index>(s) * n_symbols + q) * bits_per_symbol + i]; }
  double& at(int s, int q, int i) { return values[(static_cast<Eigen::Index>(s) * n_symbols + q) * bits_per_symbol + i]; }
  // LLRs of the defined REs in vec order (symbol-major, then subcarrier), m per RE.
  Eigen::ArrayXd data_llrs() const;
};

// Exact log-sum-exp demapping of z_k = g_hat_k s_k + w~ with
// var(w~_k) = error_variance_k + noise_variance. Only the diagonal of the
// estimation-error covariance enters; pass zeros for perfect CSI.
LlrTensor gaussian_demap(const CMatrixXd& Z, const CVectorXd& g_hat, const Eigen::VectorXd& error_variance,
                         double noise_variance, const Constellation& constellation, const PilotPattern& pattern);

// Bit LLRs of one observation; llr must hold m entries.
void demap_symbol(cd z, cd h, double variance, const Constellation& constellation, double* llr);

}  // namespace ofdm
