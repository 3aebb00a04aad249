#pragma once

#include "ofdm/types.hpp"

namespace ofdm {

struct GridConfig {
  int n_subcarriers = 72;
  int n_symbols = 14;
  int cp_length = 6;

  int n() const { return n_subcarriers * n_symbols; }
  int symbol_length() const { return n_subcarriers + cp_length; }
  int frame_length() const { return n_symbols * symbol_length(); }
  // Flat index of resource element (subcarrier, symbol) in vec(S).
  int re_index(int subcarrier, int symbol) const { return symbol * n_subcarriers + subcarrier; }

  void validate() const;  // ConfigError unless n_S >= 1, n_T >= 1, 0 <= n_CP < n_S
  bool operator==(const GridConfig&) const = default;
};

enum class ReKind : std::uint8_t { data, pilot };

// n_S x n_T symbol matrix (S) and the per-RE kind flags.
struct ResourceGrid {
  CMatrixXd symbols;
  BoolArray pilot_mask;  // true where the RE carries a pilot

  static ResourceGrid all_data(const CMatrixXd& symbols);

  ReKind kind(int subcarrier, int symbol) const {
    return pilot_mask(subcarrier, symbol) ? ReKind::pilot : ReKind::data;
  }
  int data_count() const { return static_cast<int>(pilot_mask.size() - pilot_mask.count()); }
  void check_matches(const GridConfig& cfg) const;
};

}  // namespace ofdm
