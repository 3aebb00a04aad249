#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "../support/finite_diff.hpp"
#include "../support/random_channels.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/core/diff_ofdm.hpp"
#include "ofdm/nrx/neural_rx.hpp"
#include "ofdm/numgrad/ops.hpp"

using namespace ofdm;
using ng::DiffArray;

namespace {

// Replace every parameter, including the zero-initialized output layer and
// biases, with random values so all paths carry signal.
void randomize(NeuralReceiver& rx, std::uint64_t seed, double scale = 0.5) {
  Rng rng(seed);
  for (auto& p : rx.parameters()) p.array.leaf_values() = scale * testing::random_array(p.array.size(), rng);
}

NeuralRxConfig small(int width) {
  NeuralRxConfig c;
  c.width = width;
  return c;
}

}  // namespace

TEST_CASE("c2r stacks real and imaginary parts") {
  const CMatrixXd Z = CMatrixXd::Constant(72, 14, cd(0, 1));
  const auto x = c2r(Z);
  CHECK(x.shape() == ng::Shape{72, 14, 2});
  for (std::size_t i = 0; i < x.size(); i += 2) {
    REQUIRE(x[i] == 0.0);
    REQUIRE(x[i + 1] == 1.0);
  }
  Rng rng(31);
  const CMatrixXd R = testing::random_grid(5, 3, rng);
  CHECK(r2c(c2r(R)) == R);
}

TEST_CASE("output shape, zero input and fresh-init output") {
  NeuralReceiver rx(small(8), 3);
  for (auto [s, t] : {std::pair{8, 8}, {72, 14}, {3, 3}, {13, 5}}) {
    const auto out = rx.forward(c2r(CMatrixXd::Zero(s, t)));
    CHECK(out.shape() == ng::Shape{std::size_t(s), std::size_t(t), 4});
  }
  randomize(rx, 4);
  for (auto& p : rx.parameters())
    if (p.name.ends_with(".b")) p.array.leaf_values().setZero();
  const auto zero = rx.forward(c2r(CMatrixXd::Zero(72, 14)));
  CHECK(zero.values().abs().maxCoeff() == 0.0);

  Rng rng(5);
  NeuralReceiver fresh(small(8), 6);
  const auto out = fresh.forward(c2r(testing::random_grid(72, 14, rng)));
  CHECK(out.values().abs().maxCoeff() == 0.0);  // zero output layer at init
  CHECK_THROWS_AS(rx.forward(DiffArray::zeros({8, 8, 3})), ShapeError);
}

TEST_CASE("batched forward equals per-frame forward") {
  NeuralReceiver rx(small(4), 7);
  randomize(rx, 8);
  Rng rng(9);
  std::vector<CMatrixXd> grids{testing::random_grid(10, 6, rng), testing::random_grid(10, 6, rng)};
  const auto batch = rx.forward(grids_to_array(grids));
  for (std::size_t b = 0; b < 2; ++b) {
    const auto single = rx.forward(c2r(grids[b]));
    const auto n = static_cast<Eigen::Index>(single.size());
    CHECK((batch.values().segment(n * Eigen::Index(b), n) - single.values()).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("parameter gradients match finite differences on an 8x8 grid") {
  NeuralReceiver rx(small(8), 10);
  randomize(rx, 11);
  Rng rng(12);
  const DiffArray input = c2r(testing::random_grid(8, 8, rng));
  const DiffArray weights = DiffArray::constant({8, 8, 4}, testing::random_array(256, rng));
  auto loss = [&] { return ng::sum(ng::mul(rx.forward(input), weights)); };

  ng::zero_grads(rx.parameters());
  ng::backward(loss());
  std::uniform_int_distribution<std::size_t> pick(0, rx.parameters().size() - 1);
  std::vector<std::size_t> chosen{0, rx.parameters().size() - 2};
  for (int i = 0; i < 4; ++i) chosen.push_back(pick(rng));
  for (std::size_t idx : chosen) {
    auto& p = rx.parameters()[idx];
    const Eigen::ArrayXd analytic = p.array.grad();
    const auto numeric = testing::numeric_gradient(p.array, [&] { return loss().item(); }, 1e-6);
    INFO(p.name);
    CHECK(testing::max_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("layer-norm receiver: parameter layout, gradients and round trip") {
  NeuralRxConfig cfg = small(6);
  cfg.normalization = RxNormalization::layer;
  NeuralReceiver rx(cfg, 21);
  CHECK(rx.parameters().size() == NeuralReceiver(small(6), 21).parameters().size() + 2 * 9);
  randomize(rx, 22);
  Rng rng(23);
  const DiffArray input = c2r(testing::random_grid(8, 6, rng));
  const DiffArray weights = DiffArray::constant({8, 6, 4}, testing::random_array(192, rng));
  auto loss = [&] { return ng::sum(ng::mul(rx.forward(input), weights)); };
  ng::zero_grads(rx.parameters());
  ng::backward(loss());
  for (const auto& p : rx.parameters()) {
    if (p.name.find("norm") == std::string::npos) continue;
    const auto numeric = testing::numeric_gradient(p.array, [&] { return loss().item(); }, 1e-6);
    INFO(p.name);
    CHECK(testing::max_relative_error(p.array.grad(), numeric) < 1e-4);
  }
  const auto path = (std::filesystem::temp_directory_path() / "ofdm_nrx_ln_test.nga").string();
  rx.save(path);
  const auto back = NeuralReceiver::load(path);
  std::remove(path.c_str());
  CHECK(back.config() == cfg);
  CHECK((back.forward(input).values() - rx.forward(input).values()).abs().maxCoeff() == 0.0);
  CHECK(parse_rx_normalization("layer") == RxNormalization::layer);
  CHECK_THROWS_AS(parse_rx_normalization("batch"), ConfigError);
}

TEST_CASE("receptive field reaches the dilated footprint and no further") {
  NeuralReceiver rx(small(4), 13);
  randomize(rx, 14);
  const int S = 96, T = 30, s0 = 48, t0 = 15;
  const auto base = rx.forward(c2r(CMatrixXd::Zero(S, T))).values();
  CMatrixXd Z = CMatrixXd::Zero(S, T);
  Z(s0, t0) = cd(1.0, -0.5);
  const Eigen::ArrayXd delta = (rx.forward(c2r(Z)).values() - base).abs();
  auto influence = [&](int s, int t) {
    double v = 0;
    for (int i = 0; i < 4; ++i) v += delta[(s * T + t) * 4 + i];
    return v;
  };
  // Half-extent per axis: 1 (input) + 2 * sum of block dilations.
  const int reach_s = 1 + 2 * (3 + 6 + 6 + 3), reach_t = 1 + 2 * (1 + 2 + 2 + 1);
  CHECK(reach_s == 37);
  int max_ds = 0, max_dt = 0;
  bool outside = false;
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < T; ++t)
      if (influence(s, t) > 0) {
        max_ds = std::max(max_ds, std::abs(s - s0));
        max_dt = std::max(max_dt, std::abs(t - t0));
        outside |= std::abs(s - s0) > reach_s || std::abs(t - t0) > reach_t;
      }
  CHECK_FALSE(outside);
  CHECK(max_ds >= 18);
  CHECK(influence(s0 + 18, t0) + influence(s0 - 18, t0) > 0);
  MESSAGE("observed reach: " << max_ds << " subcarriers, " << max_dt << " symbols");
}

TEST_CASE("shifting the input by one symbol shifts interior outputs") {
  NeuralReceiver rx(small(4), 15);
  randomize(rx, 16);
  Rng rng(17);
  const int S = 96, T = 40;
  const CMatrixXd Z = testing::random_grid(S, T, rng);
  CMatrixXd shifted = CMatrixXd::Zero(S, T);
  shifted.rightCols(T - 1) = Z.leftCols(T - 1);
  const auto a = rx.forward(c2r(Z)).values();
  const auto b = rx.forward(c2r(shifted)).values();
  double worst = 0;
  for (int s = 37; s < S - 37; ++s)
    for (int t = 14; t < T - 15; ++t)
      for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[(s * T + t) * 4 + i] - b[(s * T + t + 1) * 4 + i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("checkpoint round trip restores config and weights") {
  NeuralRxConfig cfg = small(6);
  cfg.block_dilations[2] = {4, 1};
  NeuralReceiver rx(cfg, 18);
  randomize(rx, 19);
  const auto path = (std::filesystem::temp_directory_path() / "ofdm_nrx_test.nga").string();
  rx.save(path);
  const auto back = NeuralReceiver::load(path);
  std::remove(path.c_str());
  CHECK(back.config() == cfg);
  Rng rng(20);
  const auto in = c2r(testing::random_grid(12, 7, rng));
  CHECK((back.forward(in).values() - rx.forward(in).values()).abs().maxCoeff() == 0.0);

  const auto mask = BoolArray::Constant(12, 7, false);
  const auto llr = back.infer(r2c(in), mask);
  CHECK(llr.defined.all());
  CHECK(llr.values.size() == 12 * 7 * 4);
}
