#include "ofdm/sim/config.hpp"

#include <fstream>

#include "ofdm/errors.hpp"

namespace ofdm {

using nlohmann::json;

namespace {

json dilation(const ng::Dilation& d) { return json::array({d.rows, d.cols}); }

// Rejects keys the defaults do not have; arrays and scalars are leaves.
void check_keys(const json& user, const json& defaults, const std::string& where) {
  if (!user.is_object()) {
    if (defaults.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    return;
  }
  if (!defaults.is_object()) throw ConfigError("config: '" + where + "' must not be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw ConfigError("config: unknown key '" + path + "'");
    check_keys(value, defaults.at(key), path);
  }
}

class Reader {
 public:
  Reader(const json& root, std::string section) : root_(root.at(section)), section_(std::move(section)) {}
  Reader(const Reader& parent, const std::string& sub) : root_(parent.root_.at(sub)), section_(parent.section_ + "." + sub) {}

  template <typename T>
  T get(const char* key) const {
    try {
      return root_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config: " + section_ + "." + key + ": " + e.what());
    }
  }

 private:
  const json& root_;
  std::string section_;
};

ng::Dilation read_dilation(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer() || j[0] < 1 ||
      j[1] < 1) {
    throw ConfigError("config: " + where + " must be a pair of positive integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

json default_config_json() {
  const SchemeConfig scheme = make_scheme(SchemeKind::lmmse);
  const GridConfig grid;
  const PilotLayout pilots;
  const MobilityProfile mob;
  const NeuralRxConfig rx;
  const TrainingConfig tr;
  const EvaluationConfig ev;
  json blocks = json::array();
  for (const auto& d : rx.block_dilations) blocks.push_back(dilation(d));
  return {
      {"scheme",
       {{"id", scheme.id},
        {"cp_length", scheme.cp_length},
        {"checkpoint", ""},
        {"code", ""},
        {"code_rate", scheme.code_rate},
        {"bits_per_symbol", scheme.bits_per_symbol}}},
      {"grid",
       {{"n_subcarriers", grid.n_subcarriers},
        {"n_symbols", grid.n_symbols},
        {"pilots",
         {{"symbols_1p", pilots.symbols_1p},
          {"symbols_2p", pilots.symbols_2p},
          {"subcarrier_stride", pilots.subcarrier_stride},
          {"subcarrier_offset", pilots.subcarrier_offset},
          {"seed", pilots.seed}}}}},
      {"channel",
       {{"model", to_string(ChannelModel::jakes)},
        {"min_speed_kmh", mob.min_speed_kmh},
        {"max_speed_kmh", mob.max_speed_kmh},
        {"carrier_hz", mob.carrier_hz},
        {"subcarrier_spacing_hz", mob.subcarrier_spacing_hz},
        {"n_taps", mob.n_taps},
        {"sinusoids_per_tap", mob.sinusoids_per_tap},
        {"trace", ""},
        {"covariance", ""},
        {"covariance_frames", 2000},
        {"covariance_seed", 7}}},
      {"training",
       {{"batch_size", tr.batch_size},
        {"learning_rate", tr.learning_rate},
        {"optimizer", to_string(tr.optimizer)},
        {"iterations", tr.iterations},
        {"snr_axis", to_string(tr.snr_axis)},
        {"snr_min_db", tr.snr_min_db},
        {"snr_max_db", tr.snr_max_db},
        {"seed", tr.seed},
        {"checkpoint_every", tr.checkpoint_every},
        {"loss_trace", ""},
        {"receiver",
         {{"width", rx.width},
          {"kernel", rx.kernel},
          {"input_dilation", dilation(rx.input_dilation)},
          {"normalization", to_string(rx.normalization)},
          {"block_dilations", blocks}}}}},
      {"evaluation",
       {{"speeds_kmh", ev.speeds_kmh},
        {"snr_axis", to_string(ev.snr_axis)},
        {"snr_db", ev.snr_db},
        {"max_frames", ev.max_frames},
        {"max_frame_errors", ev.max_frame_errors},
        {"chunk_frames", ev.chunk_frames},
        {"workers", ev.workers},
        {"seed", ev.seed},
        {"bp_iterations", ev.bp.max_iterations},
        {"bp_clip", ev.bp.clip},
        {"output_dir", "results"}}},
  };
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key component");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

LinkOptions RunConfig::link_options() const {
  LinkOptions o;
  o.pilot_layout = pilots;
  o.code_path = code_path;
  o.covariance_path = covariance_path;
  o.covariance_frames = covariance_frames;
  o.covariance_seed = covariance_seed;
  return o;
}

RunConfig config_from_json(const json& user, const std::vector<std::string>& overrides) {
  if (!user.is_object()) throw ConfigError("config: top level must be an object");
  json merged = user;
  for (const auto& o : overrides) apply_override(merged, o);
  const json defaults = default_config_json();
  check_keys(merged, defaults, "");
  json full = defaults;
  full.merge_patch(merged);

  RunConfig c;
  c.resolved = full;

  const Reader sc(full, "scheme");
  c.scheme = parse_scheme(sc.get<std::string>("id"), sc.get<int>("cp_length"));
  // GS and no-CP schemes fix their own CP; an explicit conflicting value is an error.
  if (merged.contains("scheme") && merged["scheme"].contains("cp_length") &&
      sc.get<int>("cp_length") != c.scheme.cp_length) {
    throw ConfigError("config: scheme " + c.scheme.id + " has no cyclic prefix, but scheme.cp_length = " +
                      std::to_string(sc.get<int>("cp_length")));
  }
  c.scheme.checkpoint = sc.get<std::string>("checkpoint");
  c.scheme.code_rate = sc.get<double>("code_rate");
  c.scheme.bits_per_symbol = sc.get<int>("bits_per_symbol");
  c.code_path = sc.get<std::string>("code");
  c.scheme.validate();

  const Reader gr(full, "grid");
  c.grid.n_subcarriers = gr.get<int>("n_subcarriers");
  c.grid.n_symbols = gr.get<int>("n_symbols");
  c.grid.cp_length = c.scheme.cp_length;
  c.grid.validate();
  const Reader pl(gr, "pilots");
  c.pilots.symbols_1p = pl.get<std::vector<int>>("symbols_1p");
  c.pilots.symbols_2p = pl.get<std::vector<int>>("symbols_2p");
  c.pilots.subcarrier_stride = pl.get<int>("subcarrier_stride");
  c.pilots.subcarrier_offset = pl.get<int>("subcarrier_offset");
  c.pilots.seed = pl.get<std::uint64_t>("seed");
  make_pilot_pattern(c.scheme.pilots, c.scheme_grid(), c.pilots);  // layout errors surface here

  const Reader ch(full, "channel");
  c.channel.model = parse_channel_model(ch.get<std::string>("model"));
  auto& mob = c.channel.mobility;
  mob.min_speed_kmh = ch.get<double>("min_speed_kmh");
  mob.max_speed_kmh = ch.get<double>("max_speed_kmh");
  mob.carrier_hz = ch.get<double>("carrier_hz");
  mob.subcarrier_spacing_hz = ch.get<double>("subcarrier_spacing_hz");
  mob.n_taps = ch.get<int>("n_taps");
  mob.sinusoids_per_tap = ch.get<int>("sinusoids_per_tap");
  mob.n_subcarriers = c.grid.n_subcarriers;
  mob.validate();
  c.channel.trace_path = ch.get<std::string>("trace");
  c.covariance_path = ch.get<std::string>("covariance");
  c.covariance_frames = ch.get<std::size_t>("covariance_frames");
  c.covariance_seed = ch.get<std::uint64_t>("covariance_seed");

  const Reader tr(full, "training");
  auto& t = c.training;
  t.batch_size = tr.get<int>("batch_size");
  t.learning_rate = tr.get<double>("learning_rate");
  t.optimizer = parse_optimizer(tr.get<std::string>("optimizer"));
  t.iterations = tr.get<int>("iterations");
  t.snr_axis = parse_snr_axis(tr.get<std::string>("snr_axis"));
  t.snr_min_db = tr.get<double>("snr_min_db");
  t.snr_max_db = tr.get<double>("snr_max_db");
  t.seed = tr.get<std::uint64_t>("seed");
  t.checkpoint_every = tr.get<int>("checkpoint_every");
  t.loss_trace_path = tr.get<std::string>("loss_trace");
  t.checkpoint_path = c.scheme.checkpoint;
  t.channel = c.channel.model;
  t.mobility = mob;
  t.validate();
  const Reader rx(tr, "receiver");
  c.receiver.width = rx.get<int>("width");
  c.receiver.kernel = rx.get<int>("kernel");
  c.receiver.bits_per_symbol = c.scheme.bits_per_symbol;
  c.receiver.normalization = parse_rx_normalization(rx.get<std::string>("normalization"));
  c.receiver.input_dilation = read_dilation(full["training"]["receiver"]["input_dilation"], "training.receiver.input_dilation");
  const json& blocks = full["training"]["receiver"]["block_dilations"];
  if (!blocks.is_array() || blocks.size() != c.receiver.block_dilations.size()) {
    throw ConfigError("config: training.receiver.block_dilations must list 4 pairs");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    c.receiver.block_dilations[i] = read_dilation(blocks[i], "training.receiver.block_dilations");
  }
  c.receiver.validate();

  const Reader ev(full, "evaluation");
  auto& e = c.evaluation;
  e.speeds_kmh = ev.get<std::vector<double>>("speeds_kmh");
  e.snr_axis = parse_snr_axis(ev.get<std::string>("snr_axis"));
  e.snr_db = ev.get<std::vector<double>>("snr_db");
  e.max_frames = ev.get<int>("max_frames");
  e.max_frame_errors = ev.get<int>("max_frame_errors");
  e.chunk_frames = ev.get<int>("chunk_frames");
  e.workers = ev.get<int>("workers");
  e.seed = ev.get<std::uint64_t>("seed");
  e.bp.max_iterations = ev.get<int>("bp_iterations");
  e.bp.clip = ev.get<double>("bp_clip");
  c.output_dir = ev.get<std::string>("output_dir");
  e.validate();
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  if (path.empty()) return config_from_json(json::object(), overrides);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return config_from_json(user, overrides);
}

}  // namespace ofdm
