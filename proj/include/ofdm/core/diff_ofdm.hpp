#pragma once

// Differentiable OFDM chain over numgrad arrays, so end-to-end training can
// backpropagate from receiver outputs to constellation points.
//   grids:   [B, n_S, n_T, 2]
//   samples: [B, frame_length, 2]

#include <vector>

#include "ofdm/channel/realization.hpp"
#include "ofdm/core/grid.hpp"
#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm {

ng::DiffArray modulate(const ng::DiffArray& grids, const GridConfig& cfg);
ng::DiffArray demodulate(const ng::DiffArray& samples, const GridConfig& cfg);
// Noise-free tapped-delay-line channel, one realization per batch entry.
// Differentiable with respect to the samples only.
ng::DiffArray apply_channel(const ng::DiffArray& samples, const std::vector<ChannelRealization>& channels);

// Conversions between Eigen complex data and the [.., 2] layout.
ng::DiffArray grids_to_array(const std::vector<CMatrixXd>& grids);
CMatrixXd array_to_grid(const ng::DiffArray& grids, std::size_t batch_index);
ng::DiffArray samples_to_array(const std::vector<CVectorXd>& samples);
CVectorXd array_to_samples(const ng::DiffArray& samples, std::size_t batch_index);

}  // namespace ofdm
