#pragma once

#include <string>
#include <vector>

#include "ofdm/core/grid.hpp"

namespace ofdm {

enum class PilotPatternId { none, one_symbol, two_symbols };

PilotPatternId parse_pilot_pattern(const std::string& name);  // "none" | "1P" | "2P"
std::string to_string(PilotPatternId id);

// Where pilots go. Defaults follow NR type-1 DMRS: every second subcarrier
// of OFDM symbol 2, plus symbol 11 for the two-symbol pattern.
struct PilotLayout {
  std::vector<int> symbols_1p = {2};
  std::vector<int> symbols_2p = {2, 11};
  int subcarrier_stride = 2;
  int subcarrier_offset = 0;
  std::uint64_t seed = 0x5eed;  // pilot QPSK values

  bool operator==(const PilotLayout&) const = default;
};

struct PilotPattern {
  PilotPatternId id = PilotPatternId::none;
  CMatrixXd values;         // n_S x n_T; zero on data REs
  std::vector<int> indices;  // ascending flat indices into vec(P)

  int count() const { return static_cast<int>(indices.size()); }
  BoolArray mask() const;
  CVectorXd pilot_vector() const;  // p restricted to the pilot REs, in index order
  // Fraction of REs that carry data, n_D / n.
  double data_ratio() const;
  std::vector<int> data_indices() const;
};

PilotPattern make_pilot_pattern(PilotPatternId id, const GridConfig& cfg, const PilotLayout& layout = {});

}  // namespace ofdm
