#include "ofdm/core/grid.hpp"

#include <string>

#include "ofdm/errors.hpp"

namespace ofdm {

void GridConfig::validate() const {
  if (n_subcarriers < 1 || n_symbols < 1) {
    throw ConfigError("grid needs n_S >= 1 and n_T >= 1, got " + std::to_string(n_subcarriers) + "x" +
                      std::to_string(n_symbols));
  }
  if (cp_length < 0 || cp_length >= n_subcarriers) {
    throw ConfigError("CP length " + std::to_string(cp_length) + " outside [0, n_S)");
  }
}

ResourceGrid ResourceGrid::all_data(const CMatrixXd& symbols) {
  return {symbols, BoolArray::Constant(symbols.rows(), symbols.cols(), false)};
}

void ResourceGrid::check_matches(const GridConfig& cfg) const {
  if (symbols.rows() != cfg.n_subcarriers || symbols.cols() != cfg.n_symbols || pilot_mask.rows() != symbols.rows() ||
      pilot_mask.cols() != symbols.cols()) {
    throw ShapeError("resource grid " + std::to_string(symbols.rows()) + "x" + std::to_string(symbols.cols()) +
                     " does not match config " + std::to_string(cfg.n_subcarriers) + "x" +
                     std::to_string(cfg.n_symbols));
  }
}

}  // namespace ofdm
