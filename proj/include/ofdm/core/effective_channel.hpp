#pragma once

#include "ofdm/channel/realization.hpp"
#include "ofdm/core/grid.hpp"

namespace ofdm {

// z = G s + w split into single-tap and interference parts.
struct EffectiveChannel {
  CMatrixXd G;  // n x n
  CVectorXd g;  // diagonal of G

  CMatrixXd interference() const;  // G with its diagonal zeroed
  double off_diagonal_norm() const;
};

// Largest n for which build_effective_channel materializes G.
inline constexpr int kMaxDenseResources = 4096;

// Dense G = (I kron F C_R) H (I kron C_T F^H). An analysis tool; the
// simulation path never forms G. ResourceError when n exceeds the guard.
EffectiveChannel build_effective_channel(const ChannelRealization& chan, const GridConfig& cfg);

// Diagonal of G only, computed per resource element in O(n (n_S + n_CP) n_R)
// without forming G.
CVectorXd effective_channel_diagonal(const ChannelRealization& chan, const GridConfig& cfg);

}  // namespace ofdm
