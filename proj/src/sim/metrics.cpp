#include "ofdm/sim/metrics.hpp"

#include <cmath>
#include <string>

#include "ofdm/errors.hpp"

namespace ofdm {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

double ebn0_to_sigma2(double ebn0_db, double rho, int bits_per_symbol, double code_rate) {
  if (!(rho > 0.0) || bits_per_symbol < 1 || !(code_rate > 0.0) || !std::isfinite(ebn0_db)) {
    throw ConfigError("ebn0_to_sigma2: rho, m and r must be positive and Eb/N0 finite");
  }
  return 1.0 / (rho * bits_per_symbol * code_rate * db_to_linear(ebn0_db));
}

double esn0_to_sigma2(double esn0_db) {
  if (!std::isfinite(esn0_db)) throw ConfigError("esn0_to_sigma2: Es/N0 must be finite");
  return 1.0 / db_to_linear(esn0_db);
}

double ebn0_to_esn0_db(double ebn0_db, double rho, int bits_per_symbol, double code_rate) {
  return -linear_to_db(ebn0_to_sigma2(ebn0_db, rho, bits_per_symbol, code_rate));
}

double goodput(double ber, double rho, int bits_per_symbol, double code_rate) {
  return code_rate * rho * bits_per_symbol * (1.0 - ber);
}

}  // namespace ofdm
