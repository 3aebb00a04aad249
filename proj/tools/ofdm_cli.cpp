// Command-line front end: training, evaluation and the offline helpers.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "ofdm/baseline/covariance.hpp"
#include "ofdm/channel/jakes.hpp"
#include "ofdm/channel/trace.hpp"
#include "ofdm/e2e/constellation_layer.hpp"
#include "ofdm/e2e/trainer.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/fec/alist.hpp"
#include "ofdm/fec/peg.hpp"
#include "ofdm/sim/config.hpp"
#include "ofdm/sim/evaluate.hpp"
#include "ofdm/sim/results.hpp"

namespace fs = std::filesystem;
using namespace ofdm;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "JSON run configuration (defaults when omitted)");
  cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set training.batch_size=16")
      ->take_all()
      ->allow_extra_args(false);
}

std::string manifest_path_for(const std::string& output) {
  fs::path p(output);
  return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void manifest(const std::string& command, const RunConfig& cfg, std::uint64_t seed, const std::string& output) {
  const std::string path = manifest_path_for(output);
  write_manifest(path, {command, cfg.resolved, seed, {fs::path(output).filename().string()}});
  std::fprintf(stderr, "manifest: %s\n", path.c_str());
}

int cmd_train(const Common& common, const std::string& checkpoint, int log_every) {
  std::vector<std::string> ov = common.overrides;
  if (!checkpoint.empty()) ov.push_back("scheme.checkpoint=" + checkpoint);
  const RunConfig cfg = load_config(common.config, ov);
  if (!cfg.scheme.uses_neural_receiver()) throw ConfigError("train: scheme " + cfg.scheme.id + " has nothing to train");
  if (cfg.scheme.checkpoint.empty()) throw ConfigError("train: set --checkpoint or scheme.checkpoint");
  ensure_parent(cfg.scheme.checkpoint);

  E2eModel model(cfg.scheme, cfg.grid, cfg.receiver, cfg.training.seed, cfg.pilots);
  std::fprintf(stderr, "train %s: %zu receiver parameters, %d iterations, batch %d\n", cfg.scheme.id.c_str(),
               model.receiver.parameter_count(), cfg.training.iterations, cfg.training.batch_size);
  Trainer trainer(model, cfg.training);
  const auto result = trainer.run([&](int it, double loss) {
    if (log_every > 0 && (it % log_every == 0 || it + 1 == cfg.training.iterations)) {
      std::fprintf(stderr, "iter %6d  loss %10.3f bits/frame\n", it, loss);
    }
  });
  std::fprintf(stderr, "final loss %.3f (initial %.3f)\n", result.losses.back(), result.losses.front());
  manifest("train", cfg, cfg.training.seed, cfg.scheme.checkpoint);
  return 0;
}

int cmd_evaluate(const Common& common, std::string output) {
  const RunConfig cfg = load_config(common.config, common.overrides);
  const Link link = make_link(cfg.scheme, cfg.grid, cfg.channel, cfg.link_options());
  if (output.empty()) {
    output = (fs::path(cfg.output_dir) / (cfg.scheme.id + "_" + config_hash(cfg.resolved).substr(0, 8) + ".csv")).string();
  }
  ensure_parent(output);
  std::cout << kResultHeader << '\n';
  const auto rows = evaluate(link, cfg.evaluation, [](const ResultRow& r) { std::cout << format_row(r) << std::endl; });
  write_results(output, rows);
  std::fprintf(stderr, "results: %s\n", output.c_str());
  manifest("evaluate", cfg, cfg.evaluation.seed, output);
  return 0;
}

int cmd_fit_covariance(const Common& common, const std::string& output) {
  const RunConfig cfg = load_config(common.config, common.overrides);
  const GridConfig grid = cfg.scheme_grid();
  CovarianceModel model;
  if (!cfg.channel.trace_path.empty()) {
    const auto trace = load_trace(cfg.channel.trace_path, grid, cfg.channel.mobility.n_taps);
    model = fit_covariance(trace.frames, grid);
  } else {
    if (cfg.channel.model != ChannelModel::jakes) throw ConfigError("baseline-fit-covariance: needs a Jakes channel or a trace");
    model = fit_covariance_from_profile(grid, cfg.channel.mobility, cfg.covariance_frames, cfg.covariance_seed);
  }
  ensure_parent(output);
  model.save(output);
  std::fprintf(stderr, "covariance %ldx%ld from %zu frames: %s\n", long(model.R.rows()), long(model.R.cols()),
               model.frames, output.c_str());
  manifest("baseline-fit-covariance", cfg, cfg.covariance_seed, output);
  return 0;
}

int cmd_export_constellation(const std::string& checkpoint, int qam_bits, const std::string& output) {
  const Constellation c = checkpoint.empty() ? Constellation::qam(qam_bits) : E2eModel::load(checkpoint).constellation.snapshot();
  ensure_parent(output);
  export_constellation(output, c);
  std::fprintf(stderr, "%d points: %s\n", c.size(), output.c_str());
  return 0;
}

int cmd_make_code(const PegConfig& peg, const std::string& output) {
  const LdpcCode code = make_peg_code(peg);
  ensure_parent(output);
  save_alist(output, code);
  std::fprintf(stderr, "n=%d k=%d checks=%d edges=%d girth=%d: %s\n", code.n(), code.k(), code.n_checks(), code.edges(),
               tanner_girth(code), output.c_str());
  return 0;
}

int cmd_gen_traces(const Common& common, double speed, int frames, std::uint64_t seed, const std::string& output) {
  const RunConfig cfg = load_config(common.config, common.overrides);
  if (frames < 1) throw ConfigError("gen-traces: --frames must be >= 1");
  MobilityProfile p = cfg.channel.mobility;
  if (speed >= 0.0) p.min_speed_kmh = p.max_speed_kmh = speed;
  const GridConfig grid = cfg.scheme_grid();
  std::vector<ChannelRealization> out;
  for (int f = 0; f < frames; ++f) out.push_back(generate_channel(p, grid.frame_length(), derive_seed(seed, f)));
  ensure_parent(output);
  write_trace(output, out, p.carrier_hz);
  std::fprintf(stderr, "%d frames x %d samples x %d taps: %s\n", frames, grid.frame_length(), p.n_taps, output.c_str());
  manifest("gen-traces", cfg, seed, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM link-level simulation and end-to-end learning"};
  app.require_subcommand(1);

  Common common;
  std::string checkpoint, output;
  int log_every = 100;
  auto* train = app.add_subcommand("train", "Train a neural receiver (and, for gs, the constellation)");
  add_common(train, common);
  train->add_option("--checkpoint", checkpoint, "Output model archive (overrides scheme.checkpoint)");
  train->add_option("--log-every", log_every, "Progress line interval in iterations (0 disables)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Monte Carlo BER and goodput over speeds and SNRs");
  add_common(evaluate_cmd, common);
  evaluate_cmd->add_option("-o,--output", output, "Result table (default <output_dir>/<scheme>_<hash>.csv)");

  auto* fit = app.add_subcommand("baseline-fit-covariance", "Fit the LMMSE channel covariance");
  add_common(fit, common);
  fit->add_option("-o,--output", output, "Covariance archive")->required();

  int qam_bits = 4;
  auto* exp = app.add_subcommand("export-constellation", "Write constellation points with their bit labels");
  exp->add_option("--checkpoint", checkpoint, "Trained model archive (QAM when omitted)");
  exp->add_option("--qam", qam_bits, "Bits per symbol of the QAM reference");
  exp->add_option("-o,--output", output, "CSV output")->required();

  PegConfig peg;
  auto* code = app.add_subcommand("make-code", "Construct the PEG LDPC code and write it as alist");
  code->add_option("--n", peg.n, "Code length");
  code->add_option("--checks", peg.n_checks, "Parity checks");
  code->add_option("--info-degree", peg.info_degree, "Column degree of information bits");
  code->add_option("--seed", peg.seed, "Tie-breaking seed");
  code->add_option("-o,--output", output, "alist output")->required();

  double speed = -1.0;
  int frames = 100;
  std::uint64_t seed = 1;
  auto* traces = app.add_subcommand("gen-traces", "Generate a binary tap-trace file");
  add_common(traces, common);
  traces->add_option("--speed", speed, "Fixed speed in km/h (default: channel speed range)");
  traces->add_option("--frames", frames, "Number of frames");
  traces->add_option("--seed", seed, "Root seed");
  traces->add_option("-o,--output", output, "Trace output")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(common, checkpoint, log_every);
    if (*evaluate_cmd) return cmd_evaluate(common, output);
    if (*fit) return cmd_fit_covariance(common, output);
    if (*exp) return cmd_export_constellation(checkpoint, qam_bits, output);
    if (*code) return cmd_make_code(peg, output);
    if (*traces) return cmd_gen_traces(common, speed, frames, seed, output);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
