#pragma once

#include "ofdm/baseline/covariance.hpp"
#include "ofdm/baseline/pilots.hpp"

namespace ofdm {

struct LmmseResult {
  CVectorXd g_hat;
  CMatrixXd error_covariance;  // R~
};

// Whole-frame LMMSE estimator of g from the pilot REs of Z, for a fixed
// pattern, covariance and noise variance. Construction factors the n_P x n_P
// system once; estimate() is then a single matrix-vector product.
class LmmseEstimator {
 public:
  LmmseEstimator(const PilotPattern& pattern, const CovarianceModel& model, double noise_variance);

  CVectorXd estimate(const CMatrixXd& Z) const;
  CVectorXd estimate_from_pilots(const CVectorXd& z_p) const;

  const CMatrixXd& error_covariance() const { return R_tilde_; }
  const Eigen::VectorXd& error_variance() const { return error_variance_; }
  const CMatrixXd& weights() const { return W_; }  // n x n_P

 private:
  std::vector<int> indices_;
  CMatrixXd W_;
  CMatrixXd R_tilde_;
  Eigen::VectorXd error_variance_;
};

LmmseResult lmmse_estimate(const CMatrixXd& Z, const PilotPattern& pattern, const CovarianceModel& model,
                           double noise_variance);

}  // namespace ofdm
