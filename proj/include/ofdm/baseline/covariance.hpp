#pragma once

#include <span>
#include <string>

#include "ofdm/channel/realization.hpp"
#include "ofdm/core/grid.hpp"

namespace ofdm {

// Covariance R of the single-tap channel vector g (diagonal of G), fit as the
// empirical mean of g g^H (g is zero mean for Rayleigh taps).
struct CovarianceModel {
  CMatrixXd R;
  double fit_noise_variance = 0.0;
  std::size_t frames = 0;

  void save(const std::string& path) const;
  static CovarianceModel load(const std::string& path);
};

class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(const GridConfig& cfg, std::size_t block = 256);
  void add(const ChannelRealization& chan);
  void add_diagonal(const CVectorXd& g);
  std::size_t frames() const { return frames_; }
  // Warns when fewer than n frames were seen; Error when none.
  CovarianceModel finish();

 private:
  void flush();
  GridConfig cfg_;
  CMatrixXd sum_;
  CMatrixXd pending_;
  Eigen::Index pending_count_ = 0;
  std::size_t frames_ = 0;
};

CovarianceModel fit_covariance(std::span<const ChannelRealization> realizations, const GridConfig& cfg);

}  // namespace ofdm
