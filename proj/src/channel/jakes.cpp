#include "ofdm/channel/jakes.hpp"

#include <cmath>
#include <string>

#include "ofdm/errors.hpp"

namespace ofdm {

void MobilityProfile::validate() const {
  if (!(sample_rate_hz() > 0.0)) throw ConfigError("sample rate must be positive (n_subcarriers * subcarrier spacing)");
  if (min_speed_kmh < 0.0 || max_speed_kmh < min_speed_kmh) {
    throw ConfigError("speed range must satisfy 0 <= min <= max, got [" + std::to_string(min_speed_kmh) + ", " +
                      std::to_string(max_speed_kmh) + "]");
  }
  if (n_taps < 1 || sinusoids_per_tap < 1) throw ConfigError("need at least one tap and one sinusoid per tap");
  if (!(carrier_hz > 0.0)) throw ConfigError("carrier frequency must be positive");
}

Eigen::VectorXd exponential_pdp(int n_taps) {
  Eigen::VectorXd p(n_taps);
  for (int i = 0; i < n_taps; ++i) p[i] = std::exp(-double(i));
  return p / p.sum();
}

ChannelRealization generate_channel(const MobilityProfile& profile, Eigen::Index n_samples, std::uint64_t seed) {
  profile.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double speed = profile.min_speed_kmh + (profile.max_speed_kmh - profile.min_speed_kmh) * unit(rng);
  const double fd_norm = profile.max_doppler_hz(speed) / profile.sample_rate_hz();  // cycles per sample
  const Eigen::VectorXd pdp = exponential_pdp(profile.n_taps);
  const int n_sin = profile.sinusoids_per_tap;

  ChannelRealization r;
  r.taps = CMatrixXd::Zero(n_samples, profile.n_taps);
  r.speed_kmh = speed;
  r.seed = seed;
  r.generator = "jakes-sos";

  // Phasors advance by a fixed rotation per sample; resynchronized from the
  // closed form every block to bound rounding drift.
  constexpr Eigen::Index kResync = 256;
  for (int i = 0; i < profile.n_taps; ++i) {
    const double amp = std::sqrt(pdp[i] / n_sin);
    for (int k = 0; k < n_sin; ++k) {
      const double alpha = 2.0 * kPi * unit(rng);
      const double phi = 2.0 * kPi * unit(rng);
      const double omega = 2.0 * kPi * fd_norm * std::cos(alpha);
      const cd step = std::polar(1.0, omega);
      cd z;
      for (Eigen::Index t = 0; t < n_samples; ++t) {
        if (t % kResync == 0) z = std::polar(amp, phi + omega * double(t));
        r.taps(t, i) += z;
        z *= step;
      }
    }
  }
  return r;
}

}  // namespace ofdm
