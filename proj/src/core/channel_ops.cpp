#include <map>
#include <mutex>

#include "ofdm/core/ofdm.hpp"

namespace ofdm {

const CMatrixXd& dft_matrix(int n) {
  static std::mutex mu;
  static std::map<int, CMatrixXd> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, unitary_dft<double>(n)).first;
  return it->second;
}

template <>
CVectorXd modulate<double>(const CMatrixXd& grid, const GridConfig& cfg) {
  cfg.validate();
  if (grid.rows() != cfg.n_subcarriers || grid.cols() != cfg.n_symbols) {
    throw ShapeError("modulate: grid is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                     ", config expects " + std::to_string(cfg.n_subcarriers) + "x" + std::to_string(cfg.n_symbols));
  }
  const CMatrixXd time = dft_matrix(cfg.n_subcarriers).adjoint() * grid;
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length();
  CVectorXd x(cfg.frame_length());
  for (int q = 0; q < cfg.n_symbols; ++q) {
    x.segment(q * len, ncp) = time.col(q).tail(ncp);
    x.segment(q * len + ncp, ns) = time.col(q);
  }
  return x;
}

template <>
CMatrixXd demodulate<double>(const CVectorXd& y, const GridConfig& cfg) {
  cfg.validate();
  if (y.size() != cfg.frame_length()) {
    throw ShapeError("demodulate: got " + std::to_string(y.size()) + " samples, frame needs " +
                     std::to_string(cfg.frame_length()));
  }
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length();
  CMatrixXd body(ns, cfg.n_symbols);
  for (int q = 0; q < cfg.n_symbols; ++q) body.col(q) = y.segment(q * len + ncp, ns);
  return dft_matrix(ns) * body;
}

CVectorXd apply_channel(const CVectorXd& x, const ChannelRealization& chan, Rng* noise_rng) {
  if (chan.n_samples() < x.size()) {
    throw ShapeError("channel provides taps for " + std::to_string(chan.n_samples()) + " samples, stream has " +
                     std::to_string(x.size()));
  }
  const Eigen::Index nr = chan.n_taps();
  CVectorXd y = CVectorXd::Zero(x.size());
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    cd acc = 0.0;
    const Eigen::Index imax = std::min<Eigen::Index>(nr - 1, t);
    for (Eigen::Index i = 0; i <= imax; ++i) acc += x[t - i] * chan.taps(t, i);
    y[t] = acc;
  }
  if (noise_rng && chan.noise_variance > 0.0) add_awgn(y, chan.noise_variance, *noise_rng);
  return y;
}

void add_awgn(CVectorXd& y, double variance, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  for (auto& v : y) v += cd(n(rng), n(rng));
}

}  // namespace ofdm
