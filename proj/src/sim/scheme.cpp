#include "ofdm/sim/scheme.hpp"

#include "ofdm/errors.hpp"

namespace ofdm {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::geometric_shaping:
      return "gs";
    case SchemeKind::neural_qam_cp:
      return "nrx-qam-cp";
    case SchemeKind::neural_qam_no_cp:
      return "nrx-qam-nocp";
    case SchemeKind::lmmse:
      return "lmmse";
    case SchemeKind::perfect_csi:
      return "perfect-csi";
  }
  return "?";
}

GridConfig SchemeConfig::grid(const GridConfig& base) const {
  GridConfig g = base;
  g.cp_length = cp_length;
  return g;
}

int SchemeConfig::data_res(const GridConfig& base, const PilotLayout& layout) const {
  return base.n() - make_pilot_pattern(pilots, base, layout).count();
}

double SchemeConfig::rho(const GridConfig& base, const PilotLayout& layout) const {
  const GridConfig g = grid(base);
  return static_cast<double>(data_res(g, layout)) * g.n_subcarriers /
         (static_cast<double>(g.n()) * (g.n_subcarriers + g.cp_length));
}

void SchemeConfig::validate() const {
  if (!(code_rate > 0.0 && code_rate <= 1.0)) throw ConfigError("scheme " + id + ": code rate must be in (0, 1]");
  if (bits_per_symbol < 1) throw ConfigError("scheme " + id + ": bits_per_symbol must be >= 1");
  if (cp_length < 0) throw ConfigError("scheme " + id + ": negative CP length");
  if (receiver == ReceiverKind::lmmse && pilots == PilotPatternId::none) {
    throw ConfigError("scheme " + id + ": the LMMSE receiver needs pilots");
  }
  if (constellation == ConstellationSource::learned && receiver != ReceiverKind::neural) {
    throw ConfigError("scheme " + id + ": a learned constellation needs the jointly trained neural receiver");
  }
}

SchemeConfig make_scheme(SchemeKind kind, PilotPatternId pilots, int cp_length) {
  SchemeConfig s;
  s.kind = kind;
  switch (kind) {
    case SchemeKind::geometric_shaping:
      s.pilots = PilotPatternId::none;
      s.cp_length = 0;
      s.constellation = ConstellationSource::learned;
      s.receiver = ReceiverKind::neural;
      s.id = "gs";
      return s;
    case SchemeKind::neural_qam_cp:
      s.cp_length = cp_length;
      s.receiver = ReceiverKind::neural;
      break;
    case SchemeKind::neural_qam_no_cp:
      s.cp_length = 0;
      s.receiver = ReceiverKind::neural;
      break;
    case SchemeKind::lmmse:
      s.cp_length = cp_length;
      s.receiver = ReceiverKind::lmmse;
      break;
    case SchemeKind::perfect_csi:
      s.cp_length = cp_length;
      s.receiver = ReceiverKind::perfect_csi;
      break;
  }
  s.pilots = pilots;
  s.id = to_string(kind) + "-" + to_string(pilots);
  return s;
}

SchemeConfig parse_scheme(const std::string& id, int cp_length) {
  if (id == "gs") return make_scheme(SchemeKind::geometric_shaping);
  for (auto kind : {SchemeKind::neural_qam_cp, SchemeKind::neural_qam_no_cp, SchemeKind::lmmse,
                    SchemeKind::perfect_csi}) {
    const std::string prefix = to_string(kind) + "-";
    if (id.rfind(prefix, 0) == 0) return make_scheme(kind, parse_pilot_pattern(id.substr(prefix.size())), cp_length);
  }
  throw ConfigError("unknown scheme '" + id +
                    "' (expected gs, nrx-qam-cp-<1P|2P>, nrx-qam-nocp-<1P|2P>, lmmse-<1P|2P> or perfect-csi-<1P|2P>)");
}

}  // namespace ofdm
