#include "ofdm/baseline/lmmse.hpp"

#include <sstream>

#include "ofdm/errors.hpp"

namespace ofdm {

LmmseEstimator::LmmseEstimator(const PilotPattern& pattern, const CovarianceModel& model, double noise_variance)
    : indices_(pattern.indices) {
  const auto n = model.R.rows();
  const auto np = static_cast<Eigen::Index>(indices_.size());
  if (np == 0) throw ConfigError("LMMSE estimation needs at least one pilot");
  if (n != pattern.values.size()) {
    throw ShapeError("LMMSE: covariance is " + std::to_string(n) + "x" + std::to_string(n) + " but the grid has " +
                     std::to_string(pattern.values.size()) + " resource elements");
  }
  if (!(noise_variance >= 0.0)) throw ConfigError("LMMSE: noise variance must be >= 0");

  const CVectorXd p = pattern.pilot_vector();
  // R_{:,P} diag(p_P)^H and A = diag(p_P) R_PP diag(p_P)^H + s2 I.
  CMatrixXd RPd(n, np);
  for (Eigen::Index j = 0; j < np; ++j) RPd.col(j) = model.R.col(indices_[j]) * std::conj(p[j]);
  CMatrixXd A(np, np);
  for (Eigen::Index i = 0; i < np; ++i) A.row(i) = p[i] * RPd.row(indices_[i]);
  A.diagonal().array() += noise_variance;

  Eigen::LDLT<CMatrixXd> ldlt(A);
  double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  const Eigen::VectorXd d = ldlt.vectorD().real().cwiseAbs();
  rcond = std::min(rcond, d.minCoeff() / std::max(d.maxCoeff(), 1e-300));
  if (!(rcond > 1e-13)) {
    std::ostringstream os;
    os << "LMMSE: pilot system is singular (rcond " << rcond << ", noise variance " << noise_variance << ", n_P "
       << np << ")";
    throw NumericalError(os.str());
  }
  // W = RPd A^-1, solved as A W^H = RPd^H (A Hermitian).
  W_ = ldlt.solve(RPd.adjoint()).adjoint();
  R_tilde_ = model.R - W_ * RPd.adjoint();
  R_tilde_ = (0.5 * (R_tilde_ + R_tilde_.adjoint())).eval();
  error_variance_ = R_tilde_.diagonal().real().cwiseMax(0.0);
}

CVectorXd LmmseEstimator::estimate_from_pilots(const CVectorXd& z_p) const {
  if (z_p.size() != W_.cols()) throw ShapeError("LMMSE: pilot observation has wrong length");
  return W_ * z_p;
}

CVectorXd LmmseEstimator::estimate(const CMatrixXd& Z) const {
  if (Z.size() != W_.rows()) throw ShapeError("LMMSE: received grid has wrong size");
  CVectorXd z_p(W_.cols());
  for (Eigen::Index j = 0; j < z_p.size(); ++j) z_p[j] = Z.reshaped()[indices_[j]];
  return W_ * z_p;
}

LmmseResult lmmse_estimate(const CMatrixXd& Z, const PilotPattern& pattern, const CovarianceModel& model,
                           double noise_variance) {
  LmmseEstimator est(pattern, model, noise_variance);
  return {est.estimate(Z), est.error_covariance()};
}

}  // namespace ofdm
