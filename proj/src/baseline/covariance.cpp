#include "ofdm/baseline/covariance.hpp"

#include <json.hpp>

#include "ofdm/core/effective_channel.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/numgrad/checkpoint.hpp"

namespace ofdm {

CovarianceAccumulator::CovarianceAccumulator(const GridConfig& cfg, std::size_t block)
    : cfg_(cfg),
      sum_(CMatrixXd::Zero(cfg.n(), cfg.n())),
      pending_(cfg.n(), static_cast<Eigen::Index>(std::max<std::size_t>(block, 1))) {}

void CovarianceAccumulator::add(const ChannelRealization& chan) { add_diagonal(effective_channel_diagonal(chan, cfg_)); }

void CovarianceAccumulator::add_diagonal(const CVectorXd& g) {
  if (g.size() != cfg_.n()) throw ShapeError("covariance: channel vector has wrong length");
  pending_.col(pending_count_++) = g;
  ++frames_;
  if (pending_count_ == pending_.cols()) flush();
}

void CovarianceAccumulator::flush() {
  if (pending_count_ == 0) return;
  const auto block = pending_.leftCols(pending_count_);
  sum_.noalias() += block * block.adjoint();
  pending_count_ = 0;
}

CovarianceModel CovarianceAccumulator::finish() {
  flush();
  if (frames_ == 0) throw Error("fit_covariance: no frames");
  if (frames_ < static_cast<std::size_t>(cfg_.n())) {
    warn("covariance fit from " + std::to_string(frames_) + " frames; at least n = " + std::to_string(cfg_.n()) +
         " are recommended for a full-rank estimate");
  }
  CovarianceModel m;
  m.R = sum_ / static_cast<double>(frames_);
  m.R = (0.5 * (m.R + m.R.adjoint())).eval();
  m.frames = frames_;
  return m;
}

CovarianceModel fit_covariance(std::span<const ChannelRealization> realizations, const GridConfig& cfg) {
  CovarianceAccumulator acc(cfg);
  for (const auto& r : realizations) acc.add(r);
  return acc.finish();
}

void CovarianceModel::save(const std::string& path) const {
  const auto n = static_cast<std::size_t>(R.rows());
  Eigen::ArrayXd v(R.size() * 2);
  // Row-major [n, n, 2].
  for (Eigen::Index r = 0; r < R.rows(); ++r)
    for (Eigen::Index c = 0; c < R.cols(); ++c) {
      v[2 * (r * R.cols() + c)] = R(r, c).real();
      v[2 * (r * R.cols() + c) + 1] = R(r, c).imag();
    }
  nlohmann::json meta = {{"kind", "covariance"}, {"frames", frames}, {"fit_noise_variance", fit_noise_variance}};
  ng::save_archive(path, {meta.dump(), {{"R", {n, n, 2}, std::move(v)}}});
}

CovarianceModel CovarianceModel::load(const std::string& path) {
  const auto archive = ng::load_archive(path);
  const auto& a = archive.find("R");
  if (a.shape.size() != 3 || a.shape[0] != a.shape[1] || a.shape[2] != 2) {
    throw ParseError(path + ": covariance array must be [n,n,2], got " + ng::to_string(a.shape));
  }
  const auto n = static_cast<Eigen::Index>(a.shape[0]);
  CovarianceModel m;
  m.R.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m.R(r, c) = cd(a.values[2 * (r * n + c)], a.values[2 * (r * n + c) + 1]);
  const auto meta = nlohmann::json::parse(archive.metadata, nullptr, false);
  if (meta.is_object()) {
    m.frames = meta.value("frames", std::size_t{0});
    m.fit_noise_variance = meta.value("fit_noise_variance", 0.0);
  }
  return m;
}

}  // namespace ofdm
