#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "ofdm/channel/jakes.hpp"
#include "ofdm/channel/trace.hpp"
#include "ofdm/errors.hpp"

using namespace ofdm;

namespace {

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Lag (samples) at which the ensemble autocorrelation of tap 0 first drops below 0.5.
Eigen::Index coherence_samples(double speed, int realizations, Eigen::Index n) {
  MobilityProfile p = MobilityProfile::fixed_speed(speed);
  p.n_taps = 1;
  Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(n);
  for (int r = 0; r < realizations; ++r) {
    const auto c = generate_channel(p, n, 1000 + r);
    corr += std::conj(c.taps(0, 0)) * c.taps.col(0);
  }
  corr /= double(realizations);
  for (Eigen::Index lag = 1; lag < n; ++lag)
    if (corr[lag].real() < 0.5 * corr[0].real()) return lag;
  return n;
}

}  // namespace

TEST_CASE("profile validation") {
  MobilityProfile p;
  p.subcarrier_spacing_hz = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  MobilityProfile q;
  q.min_speed_kmh = 50;
  q.max_speed_kmh = 10;
  CHECK_THROWS_AS(generate_channel(q, 8, 1), ConfigError);
  CHECK(MobilityProfile{}.sample_rate_hz() == 72 * 30e3);
}

TEST_CASE("exponential PDP") {
  const auto p = exponential_pdp(5);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 1; i < 5; ++i) CHECK(p[i] / p[i - 1] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("zero speed gives time-invariant taps") {
  const auto c = generate_channel(MobilityProfile::fixed_speed(0.0), 1092, 42);
  CHECK(c.n_taps() == 5);
  for (Eigen::Index t = 1; t < c.n_samples(); ++t) CHECK((c.taps.row(t) - c.taps.row(0)).norm() < 1e-12);
}

TEST_CASE("same seed and profile give identical realizations") {
  MobilityProfile p;
  const auto a = generate_channel(p, 500, 9);
  const auto b = generate_channel(p, 500, 9);
  CHECK((a.taps.array() == b.taps.array()).all());
  CHECK(a.speed_kmh == b.speed_kmh);
  CHECK((generate_channel(p, 500, 10).taps - a.taps).norm() > 0.0);
}

TEST_CASE("tap autocorrelation follows J0(2 pi f_d tau)") {
  // Low sample rate so that a handful of lags spans the Bessel main lobe.
  MobilityProfile p = MobilityProfile::fixed_speed(108.0);
  p.n_subcarriers = 1;
  p.subcarrier_spacing_hz = 2000.0;
  p.n_taps = 1;
  const double fd = p.max_doppler_hz(108.0) / p.sample_rate_hz();
  const int realizations = 10000;
  const Eigen::Index lags = 12;
  Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(lags);
  for (int r = 0; r < realizations; ++r) {
    const auto c = generate_channel(p, lags, 77 + r);
    corr += std::conj(c.taps(0, 0)) * c.taps.col(0);
  }
  corr /= double(realizations);
  for (Eigen::Index tau = 0; tau < lags; ++tau) {
    CAPTURE(tau);
    const double expected = std::cyl_bessel_j(0.0, 2.0 * kPi * fd * double(tau));
    CHECK(std::abs(corr[tau].real() - expected) < 0.05);
    CHECK(std::abs(corr[tau].imag()) < 0.05);
  }
}

TEST_CASE("average channel energy is one") {
  MobilityProfile p;
  double energy = 0.0;
  const int frames = 10000;
  for (int f = 0; f < frames; ++f) {
    const auto c = generate_channel(p, 78, 5000 + f);
    energy += c.taps.squaredNorm() / double(c.n_samples());
  }
  energy /= frames;
  CHECK(energy >= 0.98);
  CHECK(energy <= 1.02);
}

TEST_CASE("coherence time shrinks as speed grows") {
  const auto slow = coherence_samples(3.6, 200, 80000);
  const auto medium = coherence_samples(36.0, 200, 80000);
  const auto fast = coherence_samples(108.0, 200, 80000);
  MESSAGE("coherence samples: " << slow << " / " << medium << " / " << fast);
  CHECK(slow > medium);
  CHECK(medium > fast);
}

TEST_CASE("trace round trip is bit-exact") {
  const auto path = temp_path("ofdm_trace_rt.bin");
  const auto path2 = temp_path("ofdm_trace_rt2.bin");
  GridConfig cfg{};
  std::vector<ChannelRealization> frames;
  for (int f = 0; f < 3; ++f) {
    auto c = generate_channel(MobilityProfile::fixed_speed(36.0), cfg.frame_length(), 300 + f);
    c.taps = c.taps.cast<std::complex<float>>().cast<cd>();
    frames.push_back(std::move(c));
  }
  write_trace(path, frames, 3.5e9);
  CHECK(std::filesystem::file_size(path) == kTraceHeaderBytes + 3 * 1092 * 5 * 8);
  const auto loaded = load_trace(path, cfg, 5);
  CHECK(loaded.warnings.empty());
  REQUIRE(loaded.frames.size() == 3);
  CHECK(loaded.header.carrier_hz == 3.5e9);
  CHECK(loaded.header.speed_kmh == frames[0].speed_kmh);
  for (int f = 0; f < 3; ++f) CHECK((loaded.frames[f].taps.array() == frames[f].taps.array()).all());
  write_trace(path2, loaded.frames, loaded.header.carrier_hz);
  CHECK(slurp(path) == slurp(path2));
  std::remove(path2.c_str());

  SUBCASE("tap-count mismatch overrides with a warning") {
    const auto r = load_trace(path, cfg, 3);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.frames[0].n_taps() == 5);
  }
  SUBCASE("frame shorter than the grid is rejected") {
    CHECK_THROWS_AS(load_trace(path, GridConfig{72, 15, 6}, 5), ParseError);
  }
  SUBCASE("truncated file names expected and found counts") {
    std::filesystem::resize_file(path, kTraceHeaderBytes + 2 * 1092 * 5 * 8 + 100);
    try {
      TraceReader reader(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("declares 3") != std::string::npos);
      CHECK(msg.find("found 2") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(TraceReader{path}, ParseError);
  }
  std::remove(path.c_str());
}
