#include "ofdm/core/effective_channel.hpp"

#include <algorithm>

#include "ofdm/core/ofdm.hpp"

namespace ofdm {

CMatrixXd EffectiveChannel::interference() const {
  CMatrixXd off = G;
  off.diagonal().setZero();
  return off;
}

double EffectiveChannel::off_diagonal_norm() const { return interference().norm(); }

namespace {

void check_taps(const ChannelRealization& chan, const GridConfig& cfg) {
  cfg.validate();
  if (chan.n_samples() < cfg.frame_length()) {
    throw ShapeError("channel covers " + std::to_string(chan.n_samples()) + " samples, frame needs " +
                     std::to_string(cfg.frame_length()));
  }
  if (chan.n_taps() < 1) throw ShapeError("channel has no taps");
}

}  // namespace

EffectiveChannel build_effective_channel(const ChannelRealization& chan, const GridConfig& cfg) {
  check_taps(chan, cfg);
  const int n = cfg.n();
  if (n > kMaxDenseResources) {
    throw ResourceError("dense effective channel needs n <= " + std::to_string(kMaxDenseResources) + ", got n = " +
                        std::to_string(n));
  }
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length(), nt = cfg.n_symbols;
  const int frame = cfg.frame_length();
  const auto nr = static_cast<int>(chan.n_taps());
  const CMatrixXd& f = dft_matrix(ns);
  CMatrixXd ct_fh(len, ns);  // C_T F^H
  ct_fh.topRows(ncp) = f.adjoint().bottomRows(ncp);
  ct_fh.bottomRows(ns) = f.adjoint();

  EffectiveChannel out;
  out.G = CMatrixXd::Zero(n, n);
  for (int q = 0; q < nt; ++q) {
    // Received body samples of symbol q depend on transmitted samples back to
    // t_first, which may reach into earlier symbols (ISI).
    const int t0 = q * len + ncp;
    const int t_first = std::max(0, t0 - (nr - 1));
    const int q_first = t_first / len;
    const int cols = (q - q_first + 1) * ns;
    CMatrixXd ha = CMatrixXd::Zero(ns, cols);  // rows: body samples of q, cols: REs of q_first..q
    for (int r = 0; r < ns; ++r) {
      const int t = t0 + r;
      for (int i = 0; i < nr && i <= t; ++i) {
        const int src = t - i;
        if (src >= frame) continue;
        const int qs = src / len, local = src % len;
        ha.block(r, (qs - q_first) * ns, 1, ns) += chan.taps(t, i) * ct_fh.row(local);
      }
    }
    out.G.block(q * ns, q_first * ns, ns, cols) = f * ha;
  }
  out.g = out.G.diagonal();
  return out;
}

CVectorXd effective_channel_diagonal(const ChannelRealization& chan, const GridConfig& cfg) {
  check_taps(chan, cfg);
  const int ns = cfg.n_subcarriers, ncp = cfg.cp_length, len = cfg.symbol_length();
  const auto nr = static_cast<int>(chan.n_taps());
  // g_{s,q} = (1/n_S) sum_i exp(-2 pi j s i / n_S) sum_{r >= i - n_CP} h_{i, t_q + n_CP + r}
  CMatrixXd tap_sums(nr, cfg.n_symbols);
  for (int q = 0; q < cfg.n_symbols; ++q) {
    const int t0 = q * len + ncp;
    for (int i = 0; i < nr; ++i) {
      cd acc = 0.0;
      for (int r = std::max(0, i - ncp); r < ns; ++r) acc += chan.taps(t0 + r, i);
      tap_sums(i, q) = acc;
    }
  }
  CMatrixXd phase(ns, nr);
  for (int s = 0; s < ns; ++s)
    for (int i = 0; i < nr; ++i) phase(s, i) = std::polar(1.0 / ns, -2.0 * kPi * ((s * i) % ns) / ns);
  const CMatrixXd g = phase * tap_sums;  // n_S x n_T, column-major == vec order
  return Eigen::Map<const CVectorXd>(g.data(), g.size());
}

}  // namespace ofdm
