#include "ofdm/baseline/pilots.hpp"

#include <algorithm>
#include <cmath>

#include "ofdm/errors.hpp"

namespace ofdm {

PilotPatternId parse_pilot_pattern(const std::string& name) {
  if (name == "none") return PilotPatternId::none;
  if (name == "1P" || name == "1p") return PilotPatternId::one_symbol;
  if (name == "2P" || name == "2p") return PilotPatternId::two_symbols;
  throw ConfigError("unknown pilot pattern '" + name + "' (expected none, 1P or 2P)");
}

std::string to_string(PilotPatternId id) {
  switch (id) {
    case PilotPatternId::none:
      return "none";
    case PilotPatternId::one_symbol:
      return "1P";
    case PilotPatternId::two_symbols:
      return "2P";
  }
  return "?";
}

BoolArray PilotPattern::mask() const { return values.array().abs() > 0.0; }

CVectorXd PilotPattern::pilot_vector() const {
  CVectorXd p(count());
  for (int k = 0; k < count(); ++k) p[k] = values.reshaped()[indices[k]];
  return p;
}

double PilotPattern::data_ratio() const {
  return 1.0 - static_cast<double>(count()) / static_cast<double>(values.size());
}

std::vector<int> PilotPattern::data_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(values.size()) - indices.size());
  std::size_t next = 0;
  for (int k = 0; k < values.size(); ++k) {
    if (next < indices.size() && indices[next] == k) {
      ++next;
      continue;
    }
    out.push_back(k);
  }
  return out;
}

PilotPattern make_pilot_pattern(PilotPatternId id, const GridConfig& cfg, const PilotLayout& layout) {
  cfg.validate();
  PilotPattern p;
  p.id = id;
  p.values = CMatrixXd::Zero(cfg.n_subcarriers, cfg.n_symbols);
  const std::vector<int>* symbols = nullptr;
  if (id == PilotPatternId::one_symbol) symbols = &layout.symbols_1p;
  if (id == PilotPatternId::two_symbols) symbols = &layout.symbols_2p;
  if (!symbols) return p;
  if (layout.subcarrier_stride < 1) throw ConfigError("pilot subcarrier stride must be >= 1");

  Rng rng(layout.seed);
  std::uniform_int_distribution<int> bit(0, 1);
  const double a = 1.0 / std::sqrt(2.0);
  for (int q : *symbols) {
    if (q < 0 || q >= cfg.n_symbols) {
      throw ConfigError("pilot symbol index " + std::to_string(q) + " outside the " + std::to_string(cfg.n_symbols) +
                        "-symbol grid");
    }
    for (int s = layout.subcarrier_offset; s < cfg.n_subcarriers; s += layout.subcarrier_stride) {
      const double re = bit(rng) ? a : -a;
      const double im = bit(rng) ? a : -a;
      p.values(s, q) = cd(re, im);
      p.indices.push_back(cfg.re_index(s, q));
    }
  }
  std::sort(p.indices.begin(), p.indices.end());
  return p;
}

}  // namespace ofdm
