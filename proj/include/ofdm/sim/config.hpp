#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ofdm/e2e/trainer.hpp"
#include "ofdm/sim/evaluate.hpp"

namespace ofdm {

// One run's configuration. The file is JSON with sections "scheme", "grid",
// "channel", "training" and "evaluation"; every key is optional and defaults
// to the values in default_config_json(). Unknown keys are errors.
struct RunConfig {
  SchemeConfig scheme;
  GridConfig grid;  // base grid; the scheme sets the CP length
  PilotLayout pilots;
  ChannelSpec channel;
  std::string code_path;
  std::string covariance_path;
  std::size_t covariance_frames = 2000;
  std::uint64_t covariance_seed = 7;
  NeuralRxConfig receiver;
  TrainingConfig training;
  EvaluationConfig evaluation;
  std::string output_dir = "results";

  nlohmann::json resolved;  // defaults + file + overrides, as used

  LinkOptions link_options() const;
  GridConfig scheme_grid() const { return scheme.grid(grid); }
};

nlohmann::json default_config_json();

// "section.key=value" or "section.sub.key=value". The value is parsed as
// JSON when it can be (numbers, arrays, booleans) and taken as a string
// otherwise.
void apply_override(nlohmann::json& config, const std::string& assignment);

RunConfig config_from_json(const nlohmann::json& user, const std::vector<std::string>& overrides = {});
// An empty path means defaults only.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace ofdm
