#pragma once

// OFDM modulation and demodulation with unitary DFTs. Samples are the
// vectorization of the (n_S + n_CP) x n_T time-domain matrix, i.e. OFDM
// symbols back to back, each prefixed by its CP.

#include <cmath>
#include <string>

#include "ofdm/channel/realization.hpp"
#include "ofdm/core/grid.hpp"
#include "ofdm/errors.hpp"

namespace ofdm {

// F_n with entries exp(-2 pi j k l / n) / sqrt(n).
template <typename Scalar>
CMatrixX<Scalar> unitary_dft(int n) {
  CMatrixX<Scalar> f(n, n);
  const Scalar norm = Scalar(1) / std::sqrt(Scalar(n));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      // Reduce k*l modulo n first so the angle stays small and exact.
      const auto kl = static_cast<long long>(k) * l % n;
      const Scalar angle = Scalar(-2) * Scalar(kPi) * Scalar(kl) / Scalar(n);
      f(k, l) = std::polar(norm, angle);
    }
  }
  return f;
}

// Cached double-precision DFT matrix for a given size.
const CMatrixXd& dft_matrix(int n);

template <typename Scalar>
CVectorX<Scalar> modulate(const CMatrixX<Scalar>& grid, const GridConfig& cfg) {
  cfg.validate();
  if (grid.rows() != cfg.n_subcarriers || grid.cols() != cfg.n_symbols) {
    throw ShapeError("modulate: grid is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                     ", config expects " + std::to_string(cfg.n_subcarriers) + "x" + std::to_string(cfg.n_symbols));
  }
  const CMatrixX<Scalar> fh = unitary_dft<Scalar>(cfg.n_subcarriers).adjoint();
  const CMatrixX<Scalar> time = fh * grid;
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length();
  CVectorX<Scalar> x(cfg.frame_length());
  for (int q = 0; q < cfg.n_symbols; ++q) {
    x.segment(q * len, ncp) = time.col(q).tail(ncp);
    x.segment(q * len + ncp, ns) = time.col(q);
  }
  return x;
}

template <typename Scalar>
CMatrixX<Scalar> demodulate(const CVectorX<Scalar>& y, const GridConfig& cfg) {
  cfg.validate();
  if (y.size() != cfg.frame_length()) {
    throw ShapeError("demodulate: got " + std::to_string(y.size()) + " samples, frame needs " +
                     std::to_string(cfg.frame_length()));
  }
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length();
  CMatrixX<Scalar> body(ns, cfg.n_symbols);
  for (int q = 0; q < cfg.n_symbols; ++q) body.col(q) = y.segment(q * len + ncp, ns);
  return unitary_dft<Scalar>(ns) * body;
}

template <>
CVectorXd modulate<double>(const CMatrixXd& grid, const GridConfig& cfg);
template <>
CMatrixXd demodulate<double>(const CVectorXd& y, const GridConfig& cfg);

// y_t = sum_i x_{t-i} h_{i,t} (x_t = 0 for t < 0), plus circular complex
// Gaussian noise of total variance noise_variance when an rng is given.
CVectorXd apply_channel(const CVectorXd& x, const ChannelRealization& chan, Rng* noise_rng = nullptr);

// Adds CN(0, variance) samples in place.
void add_awgn(CVectorXd& y, double variance, Rng& rng);

}  // namespace ofdm
