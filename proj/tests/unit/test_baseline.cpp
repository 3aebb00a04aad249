#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "../support/oracles.hpp"
#include "../support/random_channels.hpp"
#include "ofdm/baseline/covariance.hpp"
#include "ofdm/baseline/demapper.hpp"
#include "ofdm/baseline/lmmse.hpp"
#include "ofdm/channel/jakes.hpp"
#include "ofdm/errors.hpp"

using namespace ofdm;
using testing::random_complex;

namespace {

CMatrixXd random_covariance(int n, Rng& rng) {
  CMatrixXd L(n, n);
  for (auto& v : L.reshaped()) v = random_complex(rng);
  CMatrixXd R = L * L.adjoint();
  const Eigen::VectorXd d = R.diagonal().real().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * R * d.asDiagonal();  // unit diagonal
}

// n = 8 grid (4 subcarriers, 2 symbols) with 4 pilots on even subcarriers.
PilotPattern small_pattern(const GridConfig& cfg) {
  PilotLayout layout;
  layout.symbols_2p = {0, 1};
  return make_pilot_pattern(PilotPatternId::two_symbols, cfg, layout);
}

}  // namespace

TEST_CASE("pilot patterns have the documented counts and unit modulus") {
  const GridConfig cfg;
  CHECK(make_pilot_pattern(PilotPatternId::one_symbol, cfg).count() == 36);
  CHECK(make_pilot_pattern(PilotPatternId::two_symbols, cfg).count() == 72);
  const auto none = make_pilot_pattern(PilotPatternId::none, cfg);
  CHECK(none.count() == 0);
  CHECK(none.data_ratio() == 1.0);

  const auto p2 = make_pilot_pattern(PilotPatternId::two_symbols, cfg);
  CHECK(p2.mask().count() == 72);
  CHECK(p2.pilot_vector().cwiseAbs().minCoeff() == doctest::Approx(1.0));
  CHECK(p2.pilot_vector().cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(p2.mask()(0, 2));
  CHECK_FALSE(p2.mask()(1, 2));
  CHECK(p2.mask()(70, 11));
  CHECK(static_cast<int>(p2.data_indices().size()) == cfg.n() - 72);

  CHECK(parse_pilot_pattern("1P") == PilotPatternId::one_symbol);
  CHECK_THROWS_AS(parse_pilot_pattern("3P"), ConfigError);
  PilotLayout bad;
  bad.symbols_1p = {14};
  CHECK_THROWS_AS(make_pilot_pattern(PilotPatternId::one_symbol, cfg, bad), ConfigError);
}

TEST_CASE("LMMSE matches the joint-Gaussian conditional mean") {
  const GridConfig cfg{4, 2, 1};
  const auto pattern = small_pattern(cfg);
  REQUIRE(pattern.count() == 4);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    CovarianceModel model;
    model.R = random_covariance(8, rng);
    const double s2 = std::uniform_real_distribution<double>(0.01, 2.0)(rng);
    LmmseEstimator est(pattern, model, s2);
    CVectorXd z_p(4);
    for (auto& v : z_p) v = random_complex(rng, 2.0);
    const CVectorXd ours = est.estimate_from_pilots(z_p);
    const CVectorXd oracle =
        testing::conditional_mean_oracle(model.R, CVectorXd::Zero(8), pattern.indices, pattern.pilot_vector(), s2, z_p);
    CHECK((ours - oracle).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("LMMSE error covariance matches Monte Carlo") {
  const GridConfig cfg{4, 2, 1};
  const auto pattern = small_pattern(cfg);
  Rng rng(12);
  CovarianceModel model;
  model.R = random_covariance(8, rng);
  const double s2 = 0.3;
  LmmseEstimator est(pattern, model, s2);
  const CMatrixXd L = model.R.llt().matrixL();
  const CVectorXd p = pattern.pilot_vector();

  CMatrixXd acc = CMatrixXd::Zero(8, 8);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    CVectorXd u(8);
    for (auto& v : u) v = random_complex(rng);
    const CVectorXd g = L * u;
    CMatrixXd Z(4, 2);
    for (int k = 0; k < 8; ++k) Z.reshaped()[k] = g[k] * pattern.values.reshaped()[k];
    for (int j = 0; j < pattern.count(); ++j) Z.reshaped()[pattern.indices[j]] += random_complex(rng, std::sqrt(s2));
    const CVectorXd e = g - est.estimate(Z);
    acc += e * e.adjoint();
  }
  acc /= double(draws);
  CHECK((acc - est.error_covariance()).cwiseAbs().maxCoeff() < 0.05);
  // Explained covariance: R - R~ = W A W^H is PSD, so R~ never exceeds R on the diagonal.
  CHECK((model.R.diagonal().real() - est.error_variance()).minCoeff() > -1e-12);
}

TEST_CASE("LMMSE scalar specialization, shrinkage and singular systems") {
  const GridConfig cfg{4, 2, 1};
  PilotPattern all;
  all.values = CMatrixXd::Ones(4, 2);
  for (int k = 0; k < 8; ++k) all.indices.push_back(k);
  CovarianceModel eye;
  eye.R = CMatrixXd::Identity(8, 8);
  Rng rng(13);
  const CMatrixXd Z = testing::random_grid(4, 2, rng);
  const double s2 = 0.7;
  const auto res = lmmse_estimate(Z, all, eye, s2);
  CHECK((res.g_hat - Z.reshaped() / (1.0 + s2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res.error_covariance.diagonal().real().array() - s2 / (1.0 + s2)).abs().maxCoeff() < 1e-12);

  const auto big = lmmse_estimate(Z, all, eye, 1e8);
  CHECK(big.g_hat.norm() < 1e-6);

  CovarianceModel ones;
  ones.R = CMatrixXd::Ones(8, 8);  // rank one
  CHECK_THROWS_AS(LmmseEstimator(all, ones, 0.0), NumericalError);
  CHECK_THROWS_AS(LmmseEstimator(PilotPattern{PilotPatternId::none, CMatrixXd::Zero(4, 2), {}}, eye, 1.0),
                  ConfigError);
}

TEST_CASE("covariance fit: structure, symmetry and zero-Doppler correlation") {
  const GridConfig cfg;
  Rng rng(14);
  std::vector<ChannelRealization> flat;
  for (int f = 0; f < 20; ++f) {
    ChannelRealization r;
    r.taps = CMatrixXd::Constant(cfg.frame_length(), 1, std::polar(1.0, std::uniform_real_distribution<>(0, 6.28)(rng)));
    flat.push_back(r);
  }
  std::string captured;
  set_warning_sink([](const std::string&) {});
  const auto m = fit_covariance(flat, cfg);
  set_warning_sink(nullptr);
  CHECK((m.R.diagonal().real().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((m.R - m.R.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.R.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);

  const auto profile = MobilityProfile::fixed_speed(0.0);
  CovarianceAccumulator acc(cfg);
  for (int f = 0; f < 1100; ++f) acc.add(generate_channel(profile, cfg.frame_length(), derive_seed(99, f, 0)));
  const auto still = acc.finish();
  CHECK(still.frames == 1100);
  const Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(still.R, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() > -1e-9);
  double worst = 1.0;
  for (int s = 0; s < cfg.n_subcarriers; s += 7)
    for (int q = 1; q < cfg.n_symbols; ++q) {
      const cd c = still.R(cfg.re_index(s, 0), cfg.re_index(s, q));
      const double norm = std::sqrt(still.R(cfg.re_index(s, 0), cfg.re_index(s, 0)).real() *
                                    still.R(cfg.re_index(s, q), cfg.re_index(s, q)).real());
      worst = std::min(worst, std::abs(c) / norm);
    }
  CHECK(worst > 0.99);

  CovarianceAccumulator empty(cfg);
  CHECK_THROWS_AS(empty.finish(), Error);
}

TEST_CASE("covariance model save/load round trip") {
  Rng rng(15);
  CovarianceModel m;
  m.R = random_covariance(6, rng);
  m.frames = 42;
  m.fit_noise_variance = 0.125;
  const auto path = (std::filesystem::temp_directory_path() / "ofdm_cov_test.nga").string();
  m.save(path);
  const auto back = CovarianceModel::load(path);
  std::remove(path.c_str());
  CHECK(back.frames == 42);
  CHECK(back.fit_noise_variance == 0.125);
  CHECK((back.R - m.R).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-point demapper reduces to the linear LLR") {
  const auto bpsk = Constellation::qam(1);
  REQUIRE(bpsk.points[1] == cd(1.0));
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const cd z = random_complex(rng, 2.0);
    const double h = std::uniform_real_distribution<>(-2, 2)(rng);
    const double var = std::uniform_real_distribution<>(0.1, 3)(rng);
    double llr = 0;
    demap_symbol(z, h, var, bpsk, &llr);
    CHECK(llr == doctest::Approx(4.0 * (std::conj(cd(h)) * z).real() / var).epsilon(1e-10));
  }
}

TEST_CASE("demapper limits, antisymmetry and pilot masking") {
  const auto qam = Constellation::qam(4);
  double llr[4];
  for (int k = 0; k < 16; ++k) {
    demap_symbol(qam.points[k], 1.0, 1e-4, qam, llr);
    for (int i = 0; i < 4; ++i) CHECK((llr[i] > 0) == (qam.bit(k, i) == 1));
  }

  Constellation flipped = qam;
  for (int k = 0; k < 16; ++k) flipped.points[k] = qam.points[15 - k];
  Rng rng(17);
  double a[4], b[4];
  for (int t = 0; t < 50; ++t) {
    const cd z = random_complex(rng), h = random_complex(rng);
    demap_symbol(z, h, 0.5, qam, a);
    demap_symbol(z, h, 0.5, flipped, b);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(-b[i]).epsilon(1e-12));
  }

  // Far from the points the exact sum stays finite where exp() underflows.
  demap_symbol(cd(40, -40), 1.0, 1e-3, qam, a);
  for (double v : a) CHECK(std::isfinite(v));

  const GridConfig cfg;
  const auto pattern = make_pilot_pattern(PilotPatternId::one_symbol, cfg);
  const CMatrixXd Z = testing::random_grid(cfg.n_subcarriers, cfg.n_symbols, rng);
  const auto out = gaussian_demap(Z, CVectorXd::Ones(cfg.n()), Eigen::VectorXd::Zero(cfg.n()), 0.1, qam, pattern);
  CHECK((out.defined == !pattern.mask()).all());
  CHECK(out.data_llrs().size() == (cfg.n() - 36) * 4);
  CHECK(out.values.isFinite().all());
  CHECK_THROWS_AS(gaussian_demap(Z, CVectorXd::Ones(cfg.n()), Eigen::VectorXd::Zero(cfg.n()), 0.0, qam, pattern),
                  NumericalError);
}

TEST_CASE("16-QAM perfect-CSI BER follows the Q-function formula") {
  const auto qam = Constellation::qam(4);
  const GridConfig cfg;
  const auto none = make_pilot_pattern(PilotPatternId::none, cfg);
  for (double ebn0_db : {4.0, 8.0}) {
    const double n0 = 1.0 / (4.0 * std::pow(10.0, ebn0_db / 10.0));
    Rng rng(derive_seed(18, static_cast<std::uint64_t>(ebn0_db), 0));
    std::uniform_int_distribution<int> sym(0, 15);
    long errors = 0, bits = 0;
    while (bits < 250000) {
      CMatrixXd Z(cfg.n_subcarriers, cfg.n_symbols);
      std::vector<int> tx(cfg.n());
      for (int k = 0; k < cfg.n(); ++k) {
        tx[k] = sym(rng);
        Z.reshaped()[k] = qam.points[tx[k]] + random_complex(rng, std::sqrt(n0));
      }
      const auto llr = gaussian_demap(Z, CVectorXd::Ones(cfg.n()), Eigen::VectorXd::Zero(cfg.n()), n0, qam, none);
      const auto d = llr.data_llrs();
      for (int k = 0; k < cfg.n(); ++k)
        for (int i = 0; i < 4; ++i) errors += (d[4 * k + i] > 0) != (qam.bit(tx[k], i) == 1);
      bits += 4L * cfg.n();
    }
    const double ber = double(errors) / double(bits);
    const double oracle = testing::qam16_gray_ber(n0);
    CHECK(std::abs(ber - oracle) / oracle < 0.1);
  }
}
