#include "ofdm/nrx/neural_rx.hpp"

#include <json.hpp>

#include "ofdm/errors.hpp"
#include "ofdm/numgrad/ops.hpp"

namespace ofdm {

using ng::DiffArray;

RxNormalization parse_rx_normalization(const std::string& s) {
  if (s == "none") return RxNormalization::none;
  if (s == "layer") return RxNormalization::layer;
  throw ConfigError("unknown receiver normalization '" + s + "' (expected none or layer)");
}

std::string to_string(RxNormalization n) { return n == RxNormalization::layer ? "layer" : "none"; }

void NeuralRxConfig::validate() const {
  if (width < 1) throw ConfigError("neural receiver width must be >= 1");
  if (bits_per_symbol < 1) throw ConfigError("neural receiver bits_per_symbol must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) throw ConfigError("neural receiver kernel size must be odd");
  auto ok = [](ng::Dilation d) { return d.rows >= 1 && d.cols >= 1; };
  if (!ok(input_dilation)) throw ConfigError("dilations must be >= 1");
  for (auto d : block_dilations)
    if (!ok(d)) throw ConfigError("dilations must be >= 1");
}

bool NeuralRxConfig::operator==(const NeuralRxConfig& o) const {
  auto same = [](ng::Dilation a, ng::Dilation b) { return a.rows == b.rows && a.cols == b.cols; };
  bool eq = width == o.width && bits_per_symbol == o.bits_per_symbol && kernel == o.kernel &&
            same(input_dilation, o.input_dilation) && normalization == o.normalization;
  for (std::size_t i = 0; i < block_dilations.size(); ++i) eq = eq && same(block_dilations[i], o.block_dilations[i]);
  return eq;
}

DiffArray c2r(const CMatrixXd& Z) {
  const auto nS = static_cast<std::size_t>(Z.rows()), nT = static_cast<std::size_t>(Z.cols());
  Eigen::ArrayXd v(static_cast<Eigen::Index>(nS * nT * 2));
  for (std::size_t s = 0; s < nS; ++s)
    for (std::size_t q = 0; q < nT; ++q) {
      const cd z = Z(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(q));
      v[static_cast<Eigen::Index>((s * nT + q) * 2)] = z.real();
      v[static_cast<Eigen::Index>((s * nT + q) * 2 + 1)] = z.imag();
    }
  return DiffArray::constant({nS, nT, 2}, std::move(v));
}

CMatrixXd r2c(const DiffArray& x) {
  if (x.rank() != 3 || x.dim(2) != 2) throw ShapeError("r2c expects [n_S, n_T, 2], got " + ng::to_string(x.shape()));
  const auto nS = x.dim(0), nT = x.dim(1);
  CMatrixXd Z(static_cast<Eigen::Index>(nS), static_cast<Eigen::Index>(nT));
  for (std::size_t s = 0; s < nS; ++s)
    for (std::size_t q = 0; q < nT; ++q)
      Z(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(q)) = cd(x[(s * nT + q) * 2], x[(s * nT + q) * 2 + 1]);
  return Z;
}

namespace {

Eigen::ArrayXd he_uniform(std::size_t count, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-limit, limit);
  Eigen::ArrayXd a(static_cast<Eigen::Index>(count));
  for (auto& v : a) v = u(rng);
  return a;
}

}  // namespace

NeuralReceiver::NeuralReceiver(const NeuralRxConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const auto k = static_cast<std::size_t>(config_.kernel);
  const auto w = static_cast<std::size_t>(config_.width);
  const auto m = static_cast<std::size_t>(config_.bits_per_symbol);
  auto separable = [&](const std::string& name, std::size_t cin, std::size_t cout) {
    params_.push_back({name + ".dw", DiffArray::parameter({k, k, cin}, he_uniform(k * k * cin, k * k, rng))});
    params_.push_back({name + ".pw", DiffArray::parameter({cin, cout}, he_uniform(cin * cout, cin, rng))});
    params_.push_back({name + ".b", DiffArray::zeros({cout}, true)});
  };
  const bool norm = config_.normalization == RxNormalization::layer;
  auto layer_norm = [&](const std::string& name) {
    if (!norm) return;
    params_.push_back({name + ".gamma", DiffArray::parameter({w}, Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(w)))});
    params_.push_back({name + ".beta", DiffArray::zeros({w}, true)});
  };
  separable("input", 2, w);
  for (std::size_t b = 0; b < config_.block_dilations.size(); ++b) {
    const std::string block = "block" + std::to_string(b + 1);
    layer_norm(block + ".norm1");
    separable(block + ".conv1", w, w);
    layer_norm(block + ".norm2");
    separable(block + ".conv2", w, w);
  }
  layer_norm("output.norm");
  params_.push_back({"output.w", DiffArray::zeros({w, m}, true)});
  params_.push_back({"output.b", DiffArray::zeros({m}, true)});
}

std::size_t NeuralReceiver::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.array.size();
  return n;
}

DiffArray NeuralReceiver::forward(const DiffArray& z) const {
  if (z.rank() < 3 || z.shape().back() != 2) {
    throw ShapeError("neural receiver input must be [B, n_S, n_T, 2], got " + ng::to_string(z.shape()));
  }
  std::size_t i = 0;
  auto sep = [&](const DiffArray& x, ng::Dilation d) {
    const auto& dw = param(i), &pw = param(i + 1), &b = param(i + 2);
    i += 3;
    return ng::add_channel_bias(ng::conv2d_separable(x, dw, pw, d), b);
  };
  auto act = [&](const DiffArray& x) {
    if (config_.normalization == RxNormalization::none) return ng::relu(x);
    const auto& gamma = param(i), &beta = param(i + 1);
    i += 2;
    return ng::relu(ng::layer_norm_channels(x, gamma, beta));
  };
  DiffArray h = sep(z, config_.input_dilation);
  for (auto d : config_.block_dilations) {
    DiffArray y = sep(act(h), d);
    y = sep(act(y), d);
    h = ng::add(h, y);
  }
  h = act(h);
  h = ng::pointwise_conv2d(h, param(i));
  return ng::add_channel_bias(h, param(i + 1));
}

LlrTensor NeuralReceiver::infer(const CMatrixXd& Z, const BoolArray& pilot_mask) const {
  if (pilot_mask.rows() != Z.rows() || pilot_mask.cols() != Z.cols()) throw ShapeError("infer: mask/grid mismatch");
  const DiffArray out = forward(c2r(Z));
  LlrTensor t;
  t.n_subcarriers = static_cast<int>(Z.rows());
  t.n_symbols = static_cast<int>(Z.cols());
  t.bits_per_symbol = config_.bits_per_symbol;
  t.values = out.values();
  t.defined = !pilot_mask;
  return t;
}

std::string NeuralReceiver::metadata_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (auto d : config_.block_dilations) blocks.push_back({d.rows, d.cols});
  const nlohmann::json j = {{"kind", "neural_rx"},
                            {"width", config_.width},
                            {"bits_per_symbol", config_.bits_per_symbol},
                            {"kernel", config_.kernel},
                            {"input_dilation", {config_.input_dilation.rows, config_.input_dilation.cols}},
                            {"normalization", to_string(config_.normalization)},
                            {"block_dilations", blocks}};
  return j.dump();
}

NeuralRxConfig NeuralReceiver::config_from_metadata(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (!j.is_object()) throw ParseError("neural receiver metadata is not a JSON object");
  const auto& r = j.contains("receiver") ? j.at("receiver") : j;
  NeuralRxConfig c;
  try {
    c.width = r.at("width").get<int>();
    c.bits_per_symbol = r.at("bits_per_symbol").get<int>();
    c.kernel = r.value("kernel", 3);
    c.normalization = parse_rx_normalization(r.value("normalization", std::string("none")));
    if (r.contains("input_dilation")) c.input_dilation = {r["input_dilation"][0], r["input_dilation"][1]};
    if (r.contains("block_dilations")) {
      const auto& b = r.at("block_dilations");
      if (b.size() != c.block_dilations.size()) throw ParseError("neural receiver metadata: need 4 block dilations");
      for (std::size_t i = 0; i < b.size(); ++i) c.block_dilations[i] = {b[i][0], b[i][1]};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("neural receiver metadata: ") + e.what());
  }
  c.validate();
  return c;
}

void NeuralReceiver::save(const std::string& path) const {
  ng::save_archive(path, {metadata_json(), ng::snapshot(params_)});
}

NeuralReceiver NeuralReceiver::load(const std::string& path) {
  const auto archive = ng::load_archive(path);
  NeuralReceiver rx(config_from_metadata(archive.metadata));
  ng::restore(rx.params_, archive);
  return rx;
}

}  // namespace ofdm
