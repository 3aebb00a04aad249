#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ofdm/baseline/covariance.hpp"
#include "ofdm/baseline/lmmse.hpp"
#include "ofdm/baseline/pilots.hpp"
#include "ofdm/channel/jakes.hpp"
#include "ofdm/core/constellation.hpp"
#include "ofdm/e2e/trainer.hpp"
#include "ofdm/fec/bp_decoder.hpp"
#include "ofdm/fec/framing.hpp"
#include "ofdm/fec/ldpc_code.hpp"
#include "ofdm/nrx/neural_rx.hpp"
#include "ofdm/sim/results.hpp"
#include "ofdm/sim/scheme.hpp"

namespace ofdm {

struct ChannelSpec {
  ChannelModel model = ChannelModel::jakes;
  MobilityProfile mobility;  // training range; evaluation pins the speed per point
  std::string trace_path;    // replaces the generator when set
};

struct EvaluationConfig {
  std::vector<double> speeds_kmh{3.6, 36.0, 108.0};
  SnrAxis snr_axis = SnrAxis::ebn0;
  std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14};
  int max_frames = 1000;
  int max_frame_errors = 200;  // checked after every chunk
  int chunk_frames = 16;
  int workers = 1;
  std::uint64_t seed = 1;
  BpConfig bp;

  void validate() const;
};

// Everything a grid point needs, resolved and checked before simulation.
struct Link {
  SchemeConfig scheme;
  GridConfig grid;  // including the scheme's CP
  PilotPattern pattern;
  Constellation constellation;
  std::shared_ptr<const LdpcCode> code;
  FrameLayout layout;
  double rho = 1.0;
  ChannelSpec channel;
  std::vector<ChannelRealization> trace;  // frames reused cyclically
  double trace_speed_kmh = 0.0;
  std::optional<CovarianceModel> covariance;  // LMMSE only
  std::optional<NeuralReceiver> receiver;     // neural schemes only
};

struct LinkOptions {
  PilotLayout pilot_layout;
  std::string code_path;        // alist; empty selects the shipped code
  std::string covariance_path;  // LMMSE: empty fits one from the channel spec
  std::size_t covariance_frames = 2000;
  std::uint64_t covariance_seed = 7;
};

// Startup checks: checkpoint present and matching the scheme, code fits the
// frame, covariance matches the grid. ConfigError otherwise.
Link make_link(const SchemeConfig& scheme, const GridConfig& base_grid, const ChannelSpec& channel,
               const LinkOptions& options = {});

// One covariance for all speeds, fit from realizations drawn over the
// profile's whole speed range.
CovarianceModel fit_covariance_from_profile(const GridConfig& grid, const MobilityProfile& profile,
                                            std::size_t frames, std::uint64_t seed);

std::string default_code_path();

struct FrameOutcome {
  long bit_errors = 0;
  long info_bits = 0;
  bool frame_error = false;
};

// Draws bits, channel and noise from `seed` and runs the coded chain for one
// frame; trace links use trace frame `frame_index` (cyclically). The LMMSE
// estimator is passed in so it is factored once per point.
FrameOutcome simulate_frame(const Link& link, double speed_kmh, double noise_variance, std::uint64_t seed,
                            long frame_index, const BpConfig& bp, const LmmseEstimator* estimator = nullptr);

// Rows in speed-major, SNR-minor order. Frame seeds derive from (seed, point,
// frame) and chunks are aggregated whole, so rows do not depend on workers.
std::vector<ResultRow> evaluate(const Link& link, const EvaluationConfig& config,
                                const std::function<void(const ResultRow&)>& on_row = {});

}  // namespace ofdm
