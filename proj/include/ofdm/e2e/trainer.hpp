#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ofdm/channel/jakes.hpp"
#include "ofdm/e2e/constellation_layer.hpp"
#include "ofdm/nrx/neural_rx.hpp"
#include "ofdm/numgrad/optim.hpp"
#include "ofdm/sim/scheme.hpp"

namespace ofdm {

enum class ChannelModel { jakes, awgn };
enum class SnrAxis { ebn0, esn0 };
enum class Optimizer { adam, sgd };

ChannelModel parse_channel_model(const std::string& name);
SnrAxis parse_snr_axis(const std::string& name);
Optimizer parse_optimizer(const std::string& name);
std::string to_string(ChannelModel m);
std::string to_string(SnrAxis a);
std::string to_string(Optimizer o);

struct TrainingConfig {
  int batch_size = 100;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  int iterations = 1000;
  SnrAxis snr_axis = SnrAxis::ebn0;
  double snr_min_db = 0.0;  // drawn uniformly in dB per frame
  double snr_max_db = 15.0;
  ChannelModel channel = ChannelModel::jakes;
  MobilityProfile mobility;  // speed range, carrier, taps
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // 0: only at the end
  std::string checkpoint_path;
  std::string loss_trace_path;

  void validate() const;
};

// Transmitter constellation and receiver weights for one scheme, as stored in
// a training checkpoint.
struct E2eModel {
  SchemeConfig scheme;
  GridConfig grid;  // including the scheme's CP length
  PilotLayout pilot_layout;
  TrainableConstellation constellation;
  NeuralReceiver receiver;
  long iteration = 0;

  E2eModel(SchemeConfig scheme, const GridConfig& base_grid, const NeuralRxConfig& rx, std::uint64_t seed,
           PilotLayout layout = {});

  PilotPattern pattern() const { return make_pilot_pattern(scheme.pilots, grid, pilot_layout); }
  ng::ParameterList trainable_parameters();

  void save(const std::string& path) const;
  static E2eModel load(const std::string& path);
};

struct TrainingResult {
  std::vector<double> losses;
  int iterations_completed = 0;
};

// Joint training loop: per iteration, sample speed, SNR, channel, noise and
// bits for each frame; map, modulate, apply the channel, demodulate, run the
// receiver, evaluate the total BCE, backpropagate and take one optimizer step.
class Trainer {
 public:
  Trainer(E2eModel& model, TrainingConfig config);

  // One iteration; returns the loss (bits per frame) before the update.
  // NumericalError on a non-finite loss or gradient, parameters untouched.
  double step();
  // Runs the configured iterations. On divergence the last good state is
  // checkpointed (when a path is configured) and the NumericalError rethrown.
  TrainingResult run(const std::function<void(int, double)>& progress = {});

  int iteration() const { return iteration_; }
  const TrainingConfig& config() const { return config_; }

 private:
  double loss_at(int iteration, bool for_update);
  void write_checkpoint() const;

  E2eModel& model_;
  TrainingConfig config_;
  PilotPattern pattern_;
  std::vector<int> data_indices_;
  double rho_;
  ng::ParameterList params_;
  ng::AdamState adam_;
  int iteration_ = 0;
};

}  // namespace ofdm
