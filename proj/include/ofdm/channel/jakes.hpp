#pragma once

#include <cstdint>

#include "ofdm/channel/realization.hpp"

namespace ofdm {

inline constexpr double kSpeedOfLight = 299792458.0;

struct MobilityProfile {
  double min_speed_kmh = 0.0;
  double max_speed_kmh = 130.0;
  double carrier_hz = 3.5e9;
  double subcarrier_spacing_hz = 30e3;
  int n_subcarriers = 72;  // sample rate = n_subcarriers * subcarrier spacing
  int n_taps = 5;
  int sinusoids_per_tap = 16;

  double sample_rate_hz() const { return n_subcarriers * subcarrier_spacing_hz; }
  double max_doppler_hz(double speed_kmh) const { return speed_kmh / 3.6 * carrier_hz / kSpeedOfLight; }
  void validate() const;

  static MobilityProfile fixed_speed(double speed_kmh) {
    MobilityProfile p;
    p.min_speed_kmh = p.max_speed_kmh = speed_kmh;
    return p;
  }
};

// Exponential power-delay profile: power e^{-i} on tap i, normalized to sum 1.
Eigen::VectorXd exponential_pdp(int n_taps);

// Rayleigh taps from a sum of sinusoids with random arrival angles and
// phases, so the tap autocorrelation is J0(2 pi f_d tau) in expectation.
// Speed is drawn uniformly from the profile's range per realization.
ChannelRealization generate_channel(const MobilityProfile& profile, Eigen::Index n_samples, std::uint64_t seed);

}  // namespace ofdm
