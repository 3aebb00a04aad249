#pragma once

#include <string>

#include "ofdm/baseline/pilots.hpp"
#include "ofdm/core/grid.hpp"

namespace ofdm {

enum class SchemeKind {
  geometric_shaping,  // learned constellation, no pilots, no CP, neural receiver
  neural_qam_cp,      // QAM, pilots, CP, neural receiver
  neural_qam_no_cp,   // QAM, pilots, no CP, neural receiver
  lmmse,              // QAM, pilots, CP, LMMSE + Gaussian demapper
  perfect_csi,        // as lmmse with the true single-tap channel g
};

enum class ConstellationSource { qam, learned };
enum class ReceiverKind { lmmse, perfect_csi, neural };

struct SchemeConfig {
  std::string id;
  SchemeKind kind = SchemeKind::lmmse;
  PilotPatternId pilots = PilotPatternId::one_symbol;
  int cp_length = 6;
  ConstellationSource constellation = ConstellationSource::qam;
  ReceiverKind receiver = ReceiverKind::lmmse;
  std::string checkpoint;  // neural schemes: trained model archive
  double code_rate = 2.0 / 3.0;
  int bits_per_symbol = 4;

  bool uses_neural_receiver() const { return receiver == ReceiverKind::neural; }
  bool learns_constellation() const { return constellation == ConstellationSource::learned; }
  // Grid with this scheme's CP length.
  GridConfig grid(const GridConfig& base) const;
  int data_res(const GridConfig& base, const PilotLayout& layout = {}) const;
  // n_D n_S / (n (n_S + n_CP)).
  double rho(const GridConfig& base, const PilotLayout& layout = {}) const;
  void validate() const;
};

// Canonical ids: "gs", "nrx-qam-cp-1P", "nrx-qam-nocp-2P", "lmmse-1P",
// "perfect-csi-2P", ... The pattern suffix is ignored for "gs".
SchemeConfig make_scheme(SchemeKind kind, PilotPatternId pilots = PilotPatternId::one_symbol, int cp_length = 6);
SchemeConfig parse_scheme(const std::string& id, int cp_length = 6);
std::string to_string(SchemeKind kind);

}  // namespace ofdm
