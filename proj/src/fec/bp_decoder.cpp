#include "ofdm/fec/bp_decoder.hpp"

#include <algorithm>
#include <cmath>

#include "ofdm/errors.hpp"

namespace ofdm {

BpDecoder::BpDecoder(const LdpcCode& code, BpConfig config) : code_(code), config_(config) {
  if (config_.max_iterations < 0) throw ConfigError("BP: max_iterations must be >= 0");
  if (!(config_.clip > 0.0)) throw ConfigError("BP: clip must be positive");
  check_start_.push_back(0);
  for (const auto& row : code.checks()) {
    for (int v : row) edge_var_.push_back(v);
    check_start_.push_back(static_cast<int>(edge_var_.size()));
  }
  std::vector<std::vector<int>> per_var(static_cast<std::size_t>(code.n()));
  for (std::size_t e = 0; e < edge_var_.size(); ++e) per_var[edge_var_[e]].push_back(static_cast<int>(e));
  var_start_.push_back(0);
  for (const auto& list : per_var) {
    var_edges_.insert(var_edges_.end(), list.begin(), list.end());
    var_start_.push_back(static_cast<int>(var_edges_.size()));
  }
}

DecodeResult BpDecoder::decode(std::span<const double> llr) const {
  const int n = code_.n();
  if (static_cast<int>(llr.size()) != n) {
    throw ShapeError("BP: expected " + std::to_string(n) + " LLRs, got " + std::to_string(llr.size()));
  }
  const double clip = config_.clip;
  // Internally L > 0 favors 0, the usual BP orientation.
  Eigen::ArrayXd channel(n);
  for (int v = 0; v < n; ++v) {
    if (!std::isfinite(llr[v])) throw NumericalError("BP: non-finite LLR at position " + std::to_string(v));
    channel[v] = std::clamp(-llr[v], -clip, clip);
  }

  DecodeResult res;
  res.bits.assign(static_cast<std::size_t>(n), 0);
  Eigen::ArrayXd post = channel;
  auto decide = [&] {
    for (int v = 0; v < n; ++v) res.bits[v] = post[v] < 0.0 ? 1 : 0;
    return code_.satisfies(res.bits);
  };
  res.converged = decide();

  const std::size_t E = edge_var_.size();
  std::vector<double> v2c(E), c2v(E, 0.0), t(E), fwd, bwd;
  for (std::size_t e = 0; e < E; ++e) v2c[e] = channel[edge_var_[e]];

  while (!res.converged && res.iterations < config_.max_iterations) {
    ++res.iterations;
    // Check update: tanh rule with prefix/suffix products to exclude self.
    for (std::size_t c = 0; c + 1 < check_start_.size(); ++c) {
      const int b = check_start_[c], d = check_start_[c + 1] - b;
      fwd.assign(static_cast<std::size_t>(d) + 1, 1.0);
      bwd.assign(static_cast<std::size_t>(d) + 1, 1.0);
      for (int i = 0; i < d; ++i) t[b + i] = std::tanh(0.5 * v2c[b + i]);
      for (int i = 0; i < d; ++i) fwd[i + 1] = fwd[i] * t[b + i];
      for (int i = d - 1; i >= 0; --i) bwd[i] = bwd[i + 1] * t[b + i];
      for (int i = 0; i < d; ++i) {
        const double prod = std::clamp(fwd[i] * bwd[i + 1], -0.999999999, 0.999999999);
        c2v[b + i] = std::clamp(2.0 * std::atanh(prod), -clip, clip);
      }
    }
    // Variable update.
    for (int v = 0; v < n; ++v) {
      double total = channel[v];
      for (int j = var_start_[v]; j < var_start_[v + 1]; ++j) total += c2v[var_edges_[j]];
      post[v] = total;
      for (int j = var_start_[v]; j < var_start_[v + 1]; ++j) {
        const int e = var_edges_[j];
        v2c[e] = std::clamp(total - c2v[e], -clip, clip);
      }
    }
    res.converged = decide();
  }
  res.posterior = -post;
  return res;
}

}  // namespace ofdm
