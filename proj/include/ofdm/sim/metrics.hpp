#pragma once

namespace ofdm {

double db_to_linear(double db);
double linear_to_db(double x);

// Noise variance per complex sample for unit-energy symbols:
//   sigma2 = 1 / (rho m r Eb/N0)  and  sigma2 = 1 / (Es/N0).
double ebn0_to_sigma2(double ebn0_db, double rho, int bits_per_symbol, double code_rate);
double esn0_to_sigma2(double esn0_db);
// Es/N0 (dB) equivalent to an Eb/N0 (dB) operating point.
double ebn0_to_esn0_db(double ebn0_db, double rho, int bits_per_symbol, double code_rate);

// Information bits per transmitted sample: r rho m (1 - BER).
double goodput(double ber, double rho, int bits_per_symbol, double code_rate);

}  // namespace ofdm
