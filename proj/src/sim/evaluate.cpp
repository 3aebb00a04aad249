#include "ofdm/sim/evaluate.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <thread>

#include "ofdm/baseline/demapper.hpp"
#include "ofdm/baseline/lmmse.hpp"
#include "ofdm/channel/trace.hpp"
#include "ofdm/core/effective_channel.hpp"
#include "ofdm/core/ofdm.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/fec/alist.hpp"
#include "ofdm/sim/metrics.hpp"

namespace ofdm {

namespace {

struct Tally {
  long bit_errors = 0;
  long info_bits = 0;
  long frame_errors = 0;
};

}  // namespace

void EvaluationConfig::validate() const {
  if (speeds_kmh.empty()) throw ConfigError("evaluation: no speeds");
  for (double v : speeds_kmh)
    if (!(v >= 0.0)) throw ConfigError("evaluation: negative speed");
  if (snr_db.empty()) throw ConfigError("evaluation: empty SNR grid");
  if (max_frames < 1) throw ConfigError("evaluation: max_frames must be >= 1");
  if (max_frame_errors < 1) throw ConfigError("evaluation: max_frame_errors must be >= 1");
  if (chunk_frames < 1) throw ConfigError("evaluation: chunk_frames must be >= 1");
  if (workers < 1) throw ConfigError("evaluation: workers must be >= 1");
  if (bp.max_iterations < 1) throw ConfigError("evaluation: BP needs at least one iteration");
}

std::string default_code_path() { return std::string(OFDM_DATA_DIR) + "/codes/peg_1024_r23.alist"; }

CovarianceModel fit_covariance_from_profile(const GridConfig& grid, const MobilityProfile& profile,
                                            std::size_t frames, std::uint64_t seed) {
  profile.validate();
  CovarianceAccumulator acc(grid);
  for (std::size_t i = 0; i < frames; ++i) acc.add(generate_channel(profile, grid.frame_length(), derive_seed(seed, i)));
  return acc.finish();
}

Link make_link(const SchemeConfig& scheme, const GridConfig& base_grid, const ChannelSpec& channel,
               const LinkOptions& options) {
  scheme.validate();
  Link link;
  link.scheme = scheme;
  link.grid = scheme.grid(base_grid);
  link.grid.validate();
  link.pattern = make_pilot_pattern(scheme.pilots, link.grid, options.pilot_layout);
  link.channel = channel;
  const int m = scheme.bits_per_symbol;

  const std::string code_path = options.code_path.empty() ? default_code_path() : options.code_path;
  link.code = std::make_shared<const LdpcCode>(load_alist(code_path));
  if (std::abs(link.code->rate() - scheme.code_rate) > 0.01) {
    throw ConfigError("code " + code_path + " has rate " + std::to_string(link.code->rate()) + ", scheme " + scheme.id +
                      " expects " + std::to_string(scheme.code_rate));
  }
  link.layout = make_frame_layout(link.grid.n() - link.pattern.count(), m, link.code->n(), 3);
  link.rho = scheme.rho(base_grid, options.pilot_layout);

  if (!channel.trace_path.empty()) {
    auto loaded = load_trace(channel.trace_path, link.grid, channel.mobility.n_taps);
    if (loaded.frames.empty()) throw ConfigError("trace " + channel.trace_path + " holds no frames");
    link.trace = std::move(loaded.frames);
    link.trace_speed_kmh = loaded.header.speed_kmh;
  } else if (channel.model == ChannelModel::jakes) {
    channel.mobility.validate();
  }

  link.constellation = Constellation::qam(m);
  if (scheme.receiver == ReceiverKind::lmmse) {
    if (!options.covariance_path.empty()) {
      link.covariance = CovarianceModel::load(options.covariance_path);
      if (link.covariance->R.rows() != link.grid.n()) {
        throw ConfigError("covariance " + options.covariance_path + " is " + std::to_string(link.covariance->R.rows()) +
                          "x" + std::to_string(link.covariance->R.rows()) + ", grid has n = " +
                          std::to_string(link.grid.n()));
      }
    } else if (!link.trace.empty()) {
      link.covariance = fit_covariance(link.trace, link.grid);
    } else if (channel.model == ChannelModel::awgn) {
      const CVectorXd g = effective_channel_diagonal(ChannelRealization::identity(link.grid.frame_length()), link.grid);
      link.covariance = CovarianceModel{g * g.adjoint(), 0.0, 1};
    } else {
      link.covariance =
          fit_covariance_from_profile(link.grid, channel.mobility, options.covariance_frames, options.covariance_seed);
    }
  } else if (scheme.receiver == ReceiverKind::neural) {
    if (scheme.checkpoint.empty()) throw ConfigError("scheme " + scheme.id + " needs a trained checkpoint");
    if (!std::filesystem::exists(scheme.checkpoint)) throw ConfigError("checkpoint not found: " + scheme.checkpoint);
    E2eModel model = E2eModel::load(scheme.checkpoint);
    auto mismatch = [&](const std::string& what) {
      return ConfigError("checkpoint " + scheme.checkpoint + " was trained with a different " + what + " than scheme " +
                         scheme.id);
    };
    if (model.scheme.kind != scheme.kind) throw mismatch("scheme (" + model.scheme.id + ")");
    if (model.scheme.pilots != scheme.pilots) throw mismatch("pilot pattern");
    if (model.pilot_layout != options.pilot_layout) throw mismatch("pilot layout");
    if (!(model.grid == link.grid)) throw mismatch("grid or CP length");
    if (model.constellation.bits_per_symbol() != m) throw mismatch("bits per symbol");
    link.receiver = model.receiver;
    if (scheme.learns_constellation()) link.constellation = model.constellation.snapshot();
  }
  return link;
}

FrameOutcome simulate_frame(const Link& link, double speed_kmh, double noise_variance, std::uint64_t seed,
                            long frame_index, const BpConfig& bp, const LmmseEstimator* estimator) {
  Rng rng(seed);
  const LdpcCode& code = *link.code;
  const int m = link.scheme.bits_per_symbol;
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<Bits> info(link.layout.codewords), codewords;
  for (auto& word : info) {
    word.resize(code.k());
    for (auto& b : word) b = static_cast<std::uint8_t>(coin(rng));
    codewords.push_back(code.encode(word));
  }
  const Bits tx = frame_pack(codewords, link.layout, rng);
  const auto idx = bits_to_indices(tx, m);
  const auto data = link.pattern.data_indices();
  CMatrixXd S = link.pattern.values;
  for (std::size_t j = 0; j < data.size(); ++j) S.data()[data[j]] = link.constellation.points[idx[j]];

  ChannelRealization chan;
  if (!link.trace.empty()) {
    chan = link.trace[static_cast<std::size_t>(frame_index) % link.trace.size()];
  } else if (link.channel.model == ChannelModel::awgn) {
    chan = ChannelRealization::identity(link.grid.frame_length());
  } else {
    MobilityProfile p = link.channel.mobility;
    p.min_speed_kmh = p.max_speed_kmh = speed_kmh;
    chan = generate_channel(p, link.grid.frame_length(), rng());
  }
  chan.noise_variance = noise_variance;
  const CVectorXd y = apply_channel(modulate(S, link.grid), chan, &rng);
  const CMatrixXd Z = demodulate(y, link.grid);

  LlrTensor llr;
  switch (link.scheme.receiver) {
    case ReceiverKind::lmmse:
      if (estimator == nullptr) throw ConfigError("simulate_frame: LMMSE scheme without an estimator");
      llr = gaussian_demap(Z, estimator->estimate(Z), estimator->error_variance(), noise_variance, link.constellation,
                           link.pattern);
      break;
    case ReceiverKind::perfect_csi:
      llr = gaussian_demap(Z, effective_channel_diagonal(chan, link.grid), Eigen::VectorXd::Zero(link.grid.n()),
                           noise_variance, link.constellation, link.pattern);
      break;
    case ReceiverKind::neural:
      llr = link.receiver->infer(Z, link.pattern.mask());
      break;
  }

  const Eigen::ArrayXd flat = llr.data_llrs();
  const auto per_word = frame_unpack({flat.data(), static_cast<std::size_t>(flat.size())}, link.layout);
  const BpDecoder decoder(code, bp);
  FrameOutcome out;
  for (std::size_t c = 0; c < per_word.size(); ++c) {
    const auto result = decoder.decode({per_word[c].data(), static_cast<std::size_t>(per_word[c].size())});
    const Bits decoded = code.extract_info(result.bits);
    for (int i = 0; i < code.k(); ++i) out.bit_errors += decoded[i] != info[c][i];
    out.info_bits += code.k();
  }
  out.frame_error = out.bit_errors > 0;
  return out;
}

std::vector<ResultRow> evaluate(const Link& link, const EvaluationConfig& config,
                                const std::function<void(const ResultRow&)>& on_row) {
  config.validate();
  std::vector<double> speeds = config.speeds_kmh;
  if (!link.trace.empty()) {
    speeds = {link.trace_speed_kmh};
  } else if (link.channel.model == ChannelModel::awgn) {
    speeds = {0.0};
  }
  const int m = link.scheme.bits_per_symbol;
  const double r = link.scheme.code_rate;
  const double efficiency_db = linear_to_db(link.rho * m * r);

  std::vector<ResultRow> rows;
  for (std::size_t si = 0; si < speeds.size(); ++si) {
    for (std::size_t ni = 0; ni < config.snr_db.size(); ++ni) {
      const std::uint64_t point = si * config.snr_db.size() + ni;
      ResultRow row;
      row.scheme = link.scheme.id;
      row.speed_kmh = speeds[si];
      row.seed = config.seed;
      double sigma2;
      if (config.snr_axis == SnrAxis::ebn0) {
        row.eb_n0_db = config.snr_db[ni];
        row.es_n0_db = row.eb_n0_db + efficiency_db;
        sigma2 = ebn0_to_sigma2(row.eb_n0_db, link.rho, m, r);
      } else {
        row.es_n0_db = config.snr_db[ni];
        row.eb_n0_db = row.es_n0_db - efficiency_db;
        sigma2 = esn0_to_sigma2(row.es_n0_db);
      }

      std::optional<LmmseEstimator> estimator;
      if (link.scheme.receiver == ReceiverKind::lmmse) estimator.emplace(link.pattern, *link.covariance, sigma2);
      const LmmseEstimator* est = estimator ? &*estimator : nullptr;

      long frames = 0, frame_errors = 0, bit_errors = 0, info_bits = 0;
      while (frames < config.max_frames && frame_errors < config.max_frame_errors) {
        const long chunk = std::min<long>(config.chunk_frames, config.max_frames - frames);
        const int workers = static_cast<int>(std::min<long>(config.workers, chunk));
        std::vector<Tally> sums(workers);
        std::vector<std::exception_ptr> failures(workers);
        auto work = [&](int w) {
          try {
            for (long f = frames + w; f < frames + chunk; f += workers) {
              const auto o = simulate_frame(link, row.speed_kmh, sigma2, derive_seed(config.seed, point, f), f,
                                            config.bp, est);
              sums[w].bit_errors += o.bit_errors;
              sums[w].info_bits += o.info_bits;
              sums[w].frame_errors += o.frame_error;
            }
          } catch (...) {
            failures[w] = std::current_exception();
          }
        };
        if (workers == 1) {
          work(0);
        } else {
          std::vector<std::thread> pool;
          for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
          for (auto& t : pool) t.join();
        }
        for (auto& e : failures)
          if (e) std::rethrow_exception(e);
        for (const auto& s : sums) {
          bit_errors += s.bit_errors;
          info_bits += s.info_bits;
          frame_errors += s.frame_errors;
        }
        frames += chunk;
      }
      row.frames = frames;
      row.bit_errors = bit_errors;
      row.ber = static_cast<double>(bit_errors) / static_cast<double>(info_bits);
      row.goodput = goodput(row.ber, link.rho, m, r);
      rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return rows;
}

}  // namespace ofdm
