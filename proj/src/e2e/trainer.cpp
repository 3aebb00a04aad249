#include "ofdm/e2e/trainer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ofdm/core/diff_ofdm.hpp"
#include "ofdm/e2e/loss.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/numgrad/ops.hpp"
#include "ofdm/sim/metrics.hpp"

namespace ofdm {

ChannelModel parse_channel_model(const std::string& name) {
  if (name == "jakes") return ChannelModel::jakes;
  if (name == "awgn") return ChannelModel::awgn;
  throw ConfigError("unknown channel model '" + name + "' (expected jakes or awgn)");
}

SnrAxis parse_snr_axis(const std::string& name) {
  if (name == "ebn0") return SnrAxis::ebn0;
  if (name == "esn0") return SnrAxis::esn0;
  throw ConfigError("unknown SNR axis '" + name + "' (expected ebn0 or esn0)");
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "sgd") return Optimizer::sgd;
  throw ConfigError("unknown optimizer '" + name + "' (expected adam or sgd)");
}

std::string to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

std::string to_string(ChannelModel m) { return m == ChannelModel::jakes ? "jakes" : "awgn"; }
std::string to_string(SnrAxis a) { return a == SnrAxis::ebn0 ? "ebn0" : "esn0"; }

void TrainingConfig::validate() const {
  if (batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (iterations < 0) throw ConfigError("training.iterations must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("training.learning_rate must be positive");
  if (!(snr_min_db <= snr_max_db)) throw ConfigError("training SNR range is empty");
  if (checkpoint_every < 0) throw ConfigError("training.checkpoint_every must be >= 0");
  if (channel == ChannelModel::jakes) mobility.validate();
}

E2eModel::E2eModel(SchemeConfig s, const GridConfig& base_grid, const NeuralRxConfig& rx, std::uint64_t seed,
                   PilotLayout layout)
    : scheme(std::move(s)),
      grid(scheme.grid(base_grid)),
      pilot_layout(layout),
      constellation(Constellation::qam(scheme.bits_per_symbol), scheme.learns_constellation()),
      receiver(rx, seed) {
  scheme.validate();
  if (!scheme.uses_neural_receiver()) throw ConfigError("scheme " + scheme.id + " has no trainable receiver");
  if (rx.bits_per_symbol != scheme.bits_per_symbol) {
    throw ConfigError("receiver outputs " + std::to_string(rx.bits_per_symbol) + " LLRs per RE but scheme " +
                      scheme.id + " uses m = " + std::to_string(scheme.bits_per_symbol));
  }
}

ng::ParameterList E2eModel::trainable_parameters() {
  ng::ParameterList out;
  if (constellation.trainable()) out.push_back({"tx.points", constellation.raw()});
  for (const auto& p : receiver.parameters()) out.push_back({"rx." + p.name, p.array});
  return out;
}

void E2eModel::save(const std::string& path) const {
  nlohmann::json meta = {
      {"kind", "e2e"},
      {"scheme", scheme.id},
      {"cp_length", grid.cp_length},
      {"grid", {{"n_subcarriers", grid.n_subcarriers}, {"n_symbols", grid.n_symbols}, {"cp_length", grid.cp_length}}},
      {"pilots",
       {{"symbols_1p", pilot_layout.symbols_1p},
        {"symbols_2p", pilot_layout.symbols_2p},
        {"subcarrier_stride", pilot_layout.subcarrier_stride},
        {"subcarrier_offset", pilot_layout.subcarrier_offset},
        {"seed", pilot_layout.seed}}},
      {"receiver", nlohmann::json::parse(receiver.metadata_json())},
      {"bits_per_symbol", scheme.bits_per_symbol},
      {"code_rate", scheme.code_rate},
      {"iteration", iteration}};
  std::vector<ng::StoredArray> arrays;
  arrays.push_back({"tx.points", constellation.raw().shape(), constellation.raw().values()});
  for (const auto& p : receiver.parameters()) arrays.push_back({"rx." + p.name, p.array.shape(), p.array.values()});
  ng::save_archive(path, {meta.dump(), std::move(arrays)});
}

E2eModel E2eModel::load(const std::string& path) {
  const auto archive = ng::load_archive(path);
  const auto meta = nlohmann::json::parse(archive.metadata, nullptr, false);
  if (!meta.is_object() || meta.value("kind", "") != "e2e") {
    throw ParseError(path + ": not an end-to-end model checkpoint");
  }
  try {
    const auto& g = meta.at("grid");
    GridConfig grid{g.at("n_subcarriers").get<int>(), g.at("n_symbols").get<int>(), g.at("cp_length").get<int>()};
    SchemeConfig scheme = parse_scheme(meta.at("scheme").get<std::string>(), grid.cp_length);
    scheme.bits_per_symbol = meta.at("bits_per_symbol").get<int>();
    scheme.code_rate = meta.value("code_rate", scheme.code_rate);
    scheme.checkpoint = path;
    PilotLayout layout;
    if (meta.contains("pilots")) {
      const auto& p = meta.at("pilots");
      layout.symbols_1p = p.at("symbols_1p").get<std::vector<int>>();
      layout.symbols_2p = p.at("symbols_2p").get<std::vector<int>>();
      layout.subcarrier_stride = p.at("subcarrier_stride").get<int>();
      layout.subcarrier_offset = p.at("subcarrier_offset").get<int>();
      layout.seed = p.at("seed").get<std::uint64_t>();
    }
    const auto rx = NeuralReceiver::config_from_metadata(meta.at("receiver").dump());
    E2eModel model(scheme, grid, rx, 0, layout);
    model.iteration = meta.value("iteration", 0L);
    ng::ParameterList all;
    all.push_back({"tx.points", model.constellation.raw()});
    for (const auto& p : model.receiver.parameters()) all.push_back({"rx." + p.name, p.array});
    ng::restore(all, archive);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": malformed checkpoint metadata: " + e.what());
  }
}

Trainer::Trainer(E2eModel& model, TrainingConfig config)
    : model_(model),
      config_(std::move(config)),
      pattern_(model.pattern()),
      data_indices_(pattern_.data_indices()),
      rho_(model.scheme.rho(model.grid, model.pilot_layout)),
      params_(model.trainable_parameters()),
      adam_(ng::make_adam_state(params_, {config_.learning_rate})) {
  config_.validate();
  if (config_.channel == ChannelModel::jakes && config_.mobility.n_subcarriers != model.grid.n_subcarriers) {
    throw ConfigError("channel sample rate assumes " + std::to_string(config_.mobility.n_subcarriers) +
                      " subcarriers but the grid has " + std::to_string(model.grid.n_subcarriers));
  }
}

double Trainer::loss_at(int it, bool for_update) {
  const GridConfig& g = model_.grid;
  const int B = config_.batch_size;
  const int m = model_.scheme.bits_per_symbol;
  const auto nd = data_indices_.size();
  const auto L = static_cast<std::size_t>(g.frame_length());

  std::vector<int> indices(static_cast<std::size_t>(B) * nd);
  std::vector<std::uint8_t> bits(indices.size() * static_cast<std::size_t>(m));
  std::vector<ChannelRealization> channels;
  Eigen::ArrayXd noise(static_cast<Eigen::Index>(static_cast<std::size_t>(B) * L * 2));
  for (int b = 0; b < B; ++b) {
    Rng rng(derive_seed(config_.seed, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(b)));
    const double snr = std::uniform_real_distribution<double>(config_.snr_min_db, config_.snr_max_db)(rng);
    const double s2 = config_.snr_axis == SnrAxis::ebn0
                          ? ebn0_to_sigma2(snr, rho_, m, model_.scheme.code_rate)
                          : esn0_to_sigma2(snr);
    if (config_.channel == ChannelModel::jakes) {
      channels.push_back(generate_channel(config_.mobility, static_cast<Eigen::Index>(L), rng()));
    } else {
      channels.push_back(ChannelRealization::identity(static_cast<Eigen::Index>(L)));
    }
    std::uniform_int_distribution<int> point(0, (1 << m) - 1);
    for (std::size_t j = 0; j < nd; ++j) {
      const int p = point(rng);
      indices[b * nd + j] = p;
      for (int i = 0; i < m; ++i) bits[(b * nd + j) * m + i] = static_cast<std::uint8_t>((p >> (m - 1 - i)) & 1);
    }
    std::normal_distribution<double> w(0.0, std::sqrt(s2 / 2.0));
    for (std::size_t t = 0; t < 2 * L; ++t) noise[static_cast<Eigen::Index>(b * 2 * L + t)] = w(rng);
  }

  const ng::DiffArray points = model_.constellation.normalized();
  const ng::DiffArray grids = map_symbols(points, indices, pattern_);
  ng::DiffArray y = apply_channel(modulate(grids, g), channels);
  y = ng::add(y, ng::DiffArray::constant(y.shape(), std::move(noise)));
  const ng::DiffArray llr = model_.receiver.forward(demodulate(y, g));
  const ng::DiffArray loss = total_bce(llr, bits, data_indices_);
  const double value = loss.item();
  if (!std::isfinite(value)) throw NumericalError("training diverged: loss is " + std::to_string(value));
  if (for_update) {
    ng::zero_grads(params_);
    ng::backward(loss);
  }
  return value;
}

double Trainer::step() {
  const double loss = loss_at(iteration_, true);
  try {
    if (config_.optimizer == Optimizer::adam) {
      ng::adam_step(params_, adam_);
    } else {
      ng::sgd_step(params_, config_.learning_rate);
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("training diverged at iteration ") + std::to_string(iteration_) + ": " +
                         e.what());
  }
  ++iteration_;
  ++model_.iteration;
  return loss;
}

void Trainer::write_checkpoint() const {
  if (!config_.checkpoint_path.empty()) model_.save(config_.checkpoint_path);
}

TrainingResult Trainer::run(const std::function<void(int, double)>& progress) {
  TrainingResult result;
  std::ofstream trace;
  if (!config_.loss_trace_path.empty()) {
    trace.open(config_.loss_trace_path);
    if (!trace) throw Error("cannot write loss trace '" + config_.loss_trace_path + "'");
    trace << "iteration,loss,lr,seed\n";
  }
  char line[128];
  for (int i = 0; i < config_.iterations; ++i) {
    double loss = 0.0;
    try {
      loss = step();
    } catch (const NumericalError&) {
      write_checkpoint();
      throw;
    }
    result.losses.push_back(loss);
    result.iterations_completed = i + 1;
    if (trace) {
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%llu\n", iteration_ - 1, loss, config_.learning_rate,
                    static_cast<unsigned long long>(config_.seed));
      trace << line << std::flush;
    }
    if (progress) progress(iteration_ - 1, loss);
    if (config_.checkpoint_every > 0 && (i + 1) % config_.checkpoint_every == 0) write_checkpoint();
  }
  write_checkpoint();
  return result;
}

}  // namespace ofdm
