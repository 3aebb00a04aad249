#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "../support/finite_diff.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/numgrad/checkpoint.hpp"
#include "ofdm/numgrad/conv.hpp"
#include "ofdm/numgrad/ops.hpp"
#include "ofdm/numgrad/optim.hpp"

using namespace ofdm::ng;
using testing::max_relative_error;
using testing::numeric_gradient;
using testing::random_array;

namespace {

// Direct nested-loop reference for a dilated depthwise conv followed by a
// pointwise conv, on a single [H,W,C] image.
Eigen::ArrayXd reference_separable(const Eigen::ArrayXd& x, int h, int w, int cin, const Eigen::ArrayXd& dw, int kh,
                                   int kw, const Eigen::ArrayXd& pw, int cout, int dh, int dwl) {
  Eigen::ArrayXd mid = Eigen::ArrayXd::Zero(h * w * cin);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < cin; ++ch) {
        double acc = 0;
        for (int i = 0; i < kh; ++i)
          for (int j = 0; j < kw; ++j) {
            const int rr = r + (i - kh / 2) * dh, cc = c + (j - kw / 2) * dwl;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            acc += x[(rr * w + cc) * cin + ch] * dw[(i * kw + j) * cin + ch];
          }
        mid[(r * w + c) * cin + ch] = acc;
      }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(h * w * cout);
  for (int p = 0; p < h * w; ++p)
    for (int o = 0; o < cout; ++o)
      for (int ch = 0; ch < cin; ++ch) out[p * cout + o] += mid[p * cin + ch] * pw[ch * cout + o];
  return out;
}

void check_gradient(DiffArray param, const std::function<DiffArray()>& build, double tol = 1e-5) {
  param.zero_grad();
  backward(build());
  const Eigen::ArrayXd analytic = param.grad();
  const Eigen::ArrayXd numeric = numeric_gradient(param, [&] { return build().item(); });
  CHECK(max_relative_error(analytic, numeric) < tol);
}

}  // namespace

TEST_CASE("elementwise forward values") {
  CHECK(relu(DiffArray::scalar(-1.5)).item() == 0.0);
  CHECK(relu(DiffArray::scalar(2.5)).item() == 2.5);
  CHECK(softplus(DiffArray::scalar(800.0)).item() == doctest::Approx(800.0));
  CHECK(softplus(DiffArray::scalar(-800.0)).item() == doctest::Approx(0.0));
  CHECK(softplus(DiffArray::scalar(0.0)).item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("derivative of x*x at 3 is 6") {
  auto x = DiffArray::parameter({1}, Eigen::ArrayXd::Constant(1, 3.0));
  backward(mul(x, x));
  CHECK(x.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("log rejects non-positive input and names the index") {
  Eigen::ArrayXd v(3);
  v << 1.0, 0.0, 2.0;
  auto x = DiffArray::constant({3}, v);
  try {
    (void)log(x);
    FAIL("expected DomainError");
  } catch (const ofdm::DomainError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("broadcast rules") {
  std::mt19937_64 rng(1);
  auto a = DiffArray::constant({3, 2}, random_array(6, rng));
  auto row = DiffArray::constant({2}, random_array(2, rng));
  auto s = add(a, row);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) CHECK(s[r * 2 + c] == a[r * 2 + c] + row[c]);
  CHECK_THROWS_AS(add(a, DiffArray::zeros({3})), ofdm::ShapeError);
  CHECK_THROWS_AS(add(a, DiffArray::zeros({2, 3})), ofdm::ShapeError);
}

TEST_CASE("every elementwise op matches finite differences") {
  std::mt19937_64 rng(7);
  auto a = DiffArray::parameter({4, 3}, random_array(12, rng, 0.2, 1.5));
  auto b = DiffArray::parameter({4, 3}, random_array(12, rng, 0.5, 1.5));
  auto row = DiffArray::parameter({3}, random_array(3, rng, 0.5, 1.5));
  auto sc = DiffArray::parameter({1}, random_array(1, rng, 0.5, 1.5));
  auto w = DiffArray::constant({4, 3}, random_array(12, rng));  // weights so the loss is not symmetric

  const std::vector<std::pair<const char*, std::function<DiffArray()>>> graphs = {
      {"add", [&] { return sum(mul(add(a, b), w)); }},
      {"sub-rows", [&] { return sum(mul(sub(a, row), w)); }},
      {"mul-scalar", [&] { return sum(mul(mul(a, sc), w)); }},
      {"div", [&] { return sum(mul(div(a, b), w)); }},
      {"div-scalar", [&] { return sum(mul(div(a, sc), w)); }},
      {"relu", [&] { return sum(mul(relu(sub(a, DiffArray::scalar(0.8))), w)); }},
      {"exp", [&] { return sum(mul(exp(a), w)); }},
      {"log", [&] { return sum(mul(log(a), w)); }},
      {"sqrt", [&] { return sum(mul(sqrt(a), w)); }},
      {"square", [&] { return sum(mul(square(a), w)); }},
      {"softplus", [&] { return sum(mul(softplus(scale(a, 3.0)), w)); }},
      {"mean_rows", [&] { return sum(mul(mean_rows(mul(a, b)), row)); }},
      {"reshape", [&] { return sum(mul(reshape(a, {3, 4}), reshape(w, {3, 4}))); }},
  };
  for (const auto& [name, g] : graphs) {
    CAPTURE(name);
    for (auto p : {a, b, row, sc}) check_gradient(p, g);
  }
}

TEST_CASE("random composite graph: analytic vs central differences") {
  std::mt19937_64 rng(11);
  auto x = DiffArray::parameter({5, 4}, random_array(20, rng));
  auto y = DiffArray::parameter({4}, random_array(4, rng));
  auto build = [&] {
    auto h = relu(add(mul(x, y), DiffArray::scalar(0.1)));
    auto e = exp(scale(sub(h, square(x)), 0.5));
    return mean(softplus(add(e, mean_rows(mul(h, x)))));
  };
  check_gradient(x, build);
  check_gradient(y, build);
}

TEST_CASE("complex ops") {
  Eigen::ArrayXd one(2), xy(2), v34(2);
  one << 1, 0;
  xy << 0.3, -1.7;
  v34 << 3, 4;
  auto p = cmul(DiffArray::constant({2}, one), DiffArray::constant({2}, xy));
  CHECK(p[0] == 0.3);
  CHECK(p[1] == -1.7);
  CHECK(cabs2(DiffArray::constant({2}, v34)).item() == 25.0);
  auto c = cconj(DiffArray::constant({2}, v34));
  CHECK(c[1] == -4.0);
  CHECK_THROWS_AS(cabs2(DiffArray::zeros({3})), ofdm::ShapeError);
  CHECK_THROWS_AS(cmul(DiffArray::zeros({4, 3}), DiffArray::zeros({4, 3})), ofdm::ShapeError);

  std::mt19937_64 rng(3);
  auto u = DiffArray::parameter({6, 2}, random_array(12, rng));
  auto v = DiffArray::parameter({6, 2}, random_array(12, rng));
  auto w = DiffArray::constant({6}, random_array(6, rng));
  auto build = [&] { return sum(mul(cabs2(cmul(u, v)), w)); };
  check_gradient(u, build);
  check_gradient(v, build);
  auto build2 = [&] { return sum(mul(cabs2(add(cmul(cconj(u), v), u)), w)); };
  check_gradient(u, build2);
}

TEST_CASE("backward rules") {
  auto p = DiffArray::parameter({3, 2}, Eigen::ArrayXd::LinSpaced(6, -1, 1));
  backward(sum(p));
  CHECK((p.grad() == 1.0).all());

  // Diamond: y = exp(x) + x^2 accumulates both branches.
  auto x = DiffArray::parameter({1}, Eigen::ArrayXd::Constant(1, 0.7));
  backward(add(exp(x), square(x)));
  CHECK(x.grad()[0] == doctest::Approx(std::exp(0.7) + 1.4));

  CHECK_THROWS_AS(backward(mul(p, p)), ofdm::ShapeError);
}

TEST_CASE("shared subexpression equals expanded graph") {
  std::mt19937_64 rng(5);
  const Eigen::ArrayXd init = random_array(8, rng);
  auto x1 = DiffArray::parameter({8}, init);
  auto shared = exp(scale(x1, 0.3));
  backward(sum(mul(shared, shared)));
  auto x2 = DiffArray::parameter({8}, init);
  backward(sum(mul(exp(scale(x2, 0.3)), exp(scale(x2, 0.3)))));
  CHECK(((x1.grad() - x2.grad()).abs() < 1e-14).all());
}

TEST_CASE("degenerate 1x1 separable conv") {
  auto x = DiffArray::constant({1, 1, 1}, Eigen::ArrayXd::Constant(1, 2.0));
  auto k = DiffArray::constant({1, 1, 1}, Eigen::ArrayXd::Constant(1, 3.0));
  auto p = DiffArray::constant({1, 1}, Eigen::ArrayXd::Constant(1, 5.0));
  CHECK(conv2d_separable(x, k, p, {}).item() == 30.0);
}

TEST_CASE("impulse response reproduces dilated footprint") {
  const int h = 9, w = 7;
  Eigen::ArrayXd img = Eigen::ArrayXd::Zero(h * w);
  img[(4 * w) + 3] = 1.0;
  auto x = DiffArray::constant({h, w, 1}, img);
  Eigen::ArrayXd ker = Eigen::ArrayXd::LinSpaced(9, 1, 9);
  auto k = DiffArray::constant({3, 3, 1}, ker);
  auto p = DiffArray::constant({1, 1}, Eigen::ArrayXd::Ones(1));
  auto y = conv2d_separable(x, k, p, {2, 1});
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double expected = 0.0;
      // out(r,c) = sum_ij x(r+(i-1)*2, c+(j-1)) k(i,j): nonzero when r+(i-1)*2 = 4, c+(j-1) = 3.
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (r + (i - 1) * 2 == 4 && c + (j - 1) == 3) expected = ker[i * 3 + j];
      CHECK(y[r * w + c] == expected);
    }
}

TEST_CASE("separable conv matches nested-loop oracle and finite differences") {
  std::mt19937_64 rng(17);
  const int h = 5, w = 5, cin = 2, cout = 3;
  auto x = DiffArray::parameter({h, w, cin}, random_array(h * w * cin, rng));
  auto dw = DiffArray::parameter({3, 3, cin}, random_array(9 * cin, rng));
  auto pw = DiffArray::parameter({cin, cout}, random_array(cin * cout, rng));
  auto y = conv2d_separable(x, dw, pw, {2, 1});
  CHECK(y.shape() == Shape{h, w, cout});
  const auto ref = reference_separable(x.values(), h, w, cin, dw.values(), 3, 3, pw.values(), cout, 2, 1);
  CHECK((y.values() - ref).abs().maxCoeff() < 1e-12);

  auto wts = DiffArray::constant({h, w, cout}, random_array(h * w * cout, rng));
  auto bias = DiffArray::parameter({cout}, random_array(cout, rng));
  auto build = [&] { return sum(mul(relu(add_channel_bias(conv2d_separable(x, dw, pw, {2, 1}), bias)), wts)); };
  for (auto p : {x, dw, pw, bias}) check_gradient(p, build);
}

TEST_CASE("channel layer norm matches a direct computation and finite differences") {
  std::mt19937_64 rng(23);
  const int b = 2, h = 3, w = 2, c = 5;
  auto x = DiffArray::parameter({b, h, w, c}, random_array(b * h * w * c, rng));
  auto gamma = DiffArray::parameter({c}, random_array(c, rng));
  auto beta = DiffArray::parameter({c}, random_array(c, rng));
  const auto y = layer_norm_channels(x, gamma, beta, 1e-5);
  CHECK(y.shape() == x.shape());
  for (int k = 0; k < b * h * w; ++k) {
    const Eigen::ArrayXd v = x.values().segment(k * c, c);
    const double mu = v.mean(), var = (v - mu).square().mean();
    const Eigen::ArrayXd ref = gamma.values() * (v - mu) / std::sqrt(var + 1e-5) + beta.values();
    CHECK((y.values().segment(k * c, c) - ref).abs().maxCoeff() < 1e-12);
  }
  auto wts = DiffArray::constant(x.shape(), random_array(b * h * w * c, rng));
  auto build = [&] { return sum(mul(layer_norm_channels(x, gamma, beta), wts)); };
  for (auto p : {x, gamma, beta}) check_gradient(p, build);
  CHECK_THROWS_AS(layer_norm_channels(x, DiffArray::zeros({4}, true), beta), ofdm::ShapeError);
}

TEST_CASE("batched conv equals per-image conv") {
  std::mt19937_64 rng(19);
  const int b = 3, h = 6, w = 4, c = 2;
  auto x = DiffArray::constant({b, h, w, c}, random_array(b * h * w * c, rng));
  auto dw = DiffArray::constant({3, 3, c}, random_array(9 * c, rng));
  auto pw = DiffArray::constant({c, c}, random_array(c * c, rng));
  auto y = conv2d_separable(x, dw, pw, {3, 2});
  for (int i = 0; i < b; ++i) {
    const auto ref = reference_separable(x.values().segment(i * h * w * c, h * w * c), h, w, c, dw.values(), 3, 3,
                                         pw.values(), c, 3, 2);
    CHECK((y.values().segment(i * h * w * c, h * w * c) - ref).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conv shape errors and dilation shape preservation") {
  auto x = DiffArray::zeros({14, 72, 4});
  CHECK_THROWS_AS(depthwise_conv2d(x, DiffArray::zeros({3, 3, 3}), {}), ofdm::ShapeError);
  CHECK_THROWS_AS(depthwise_conv2d(x, DiffArray::zeros({2, 3, 4}), {}), ofdm::ShapeError);
  CHECK_THROWS_AS(pointwise_conv2d(x, DiffArray::zeros({3, 4})), ofdm::ShapeError);
  for (Dilation d : {Dilation{1, 1}, Dilation{3, 1}, Dilation{6, 2}}) {
    auto y = conv2d_separable(DiffArray::zeros({2, 72, 14, 4}), DiffArray::zeros({3, 3, 4}), DiffArray::zeros({4, 8}), d);
    CHECK(y.shape() == Shape{2, 72, 14, 8});
  }
}

TEST_CASE("gather_rows gradient scatters back") {
  std::mt19937_64 rng(23);
  auto table = DiffArray::parameter({4, 2}, random_array(8, rng));
  const std::vector<int> idx = {3, 0, 3, 1, 3};
  auto w = DiffArray::constant({5, 2}, random_array(10, rng));
  check_gradient(table, [&] { return sum(mul(gather_rows(table, idx), w)); });
  const std::vector<int> bad = {4};
  CHECK_THROWS_AS(gather_rows(table, bad), ofdm::ShapeError);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    ParameterList params{{"w", DiffArray::parameter({2}, Eigen::ArrayXd::Constant(2, 0.5))}};
    auto st = make_adam_state(params);
    backward(scale(sum(params[0].array), 0.0));
    adam_step(params, st);
    CHECK((params[0].array.values() == 0.5).all());
  }
  SUBCASE("first step with g = 1 matches the hand-computed update") {
    ParameterList params{{"w", DiffArray::parameter({1}, Eigen::ArrayXd::Constant(1, 2.0))}};
    auto st = make_adam_state(params);
    backward(sum(params[0].array));
    adam_step(params, st);
    // m = 0.1, v = 0.001, m_hat = 1, v_hat = 1 -> delta = lr / (1 + eps)
    CHECK(params[0].array.values()[0] == doctest::Approx(2.0 - 1e-3 / (1.0 + 1e-8)).epsilon(1e-15));
    CHECK(st.step == 1);
  }
  SUBCASE("constant gradient: step size approaches lr in the descent direction") {
    ParameterList params{{"w", DiffArray::parameter({1}, Eigen::ArrayXd::Zero(1))}};
    auto st = make_adam_state(params);
    double prev = 0.0, delta = 0.0;
    for (int i = 0; i < 2000; ++i) {
      params[0].array.zero_grad();
      backward(scale(sum(params[0].array), -3.0));
      adam_step(params, st);
      delta = params[0].array.values()[0] - prev;
      prev = params[0].array.values()[0];
    }
    CHECK(delta == doctest::Approx(1e-3).epsilon(1e-6));
  }
  SUBCASE("non-finite gradient names the parameter") {
    ParameterList params{{"good", DiffArray::parameter({1}, Eigen::ArrayXd::Ones(1))},
                         {"bad", DiffArray::parameter({1}, Eigen::ArrayXd::Ones(1))}};
    auto st = make_adam_state(params);
    backward(add(params[0].array, scale(params[1].array, std::numeric_limits<double>::infinity())));
    try {
      adam_step(params, st);
      FAIL("expected NumericalError");
    } catch (const ofdm::NumericalError& e) {
      CHECK(std::string(e.what()).find("'bad'") != std::string::npos);
    }
    CHECK(params[0].array.values()[0] == 1.0);
  }
}

TEST_CASE("archive round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "ng_archive_test.bin").string();
  std::mt19937_64 rng(29);
  ParameterList params{{"a", DiffArray::parameter({2, 3}, random_array(6, rng))},
                       {"b", DiffArray::parameter({4}, random_array(4, rng))}};
  save_archive(path, {"{\"k\":1}", snapshot(params)});
  auto loaded = load_archive(path);
  CHECK(loaded.metadata == "{\"k\":1}");
  ParameterList other{{"a", DiffArray::parameter({2, 3}, Eigen::ArrayXd::Zero(6))},
                      {"b", DiffArray::parameter({4}, Eigen::ArrayXd::Zero(4))}};
  restore(other, loaded);
  CHECK((other[0].array.values() == params[0].array.values()).all());
  CHECK((other[1].array.values() == params[1].array.values()).all());
  ParameterList wrong{{"a", DiffArray::parameter({3, 2}, Eigen::ArrayXd::Zero(6))}};
  CHECK_THROWS_AS(restore(wrong, loaded), ofdm::ShapeError);

  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(load_archive(path), ofdm::ParseError);
  std::remove(path.c_str());
}
