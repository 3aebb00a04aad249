#pragma once

#include <cstdint>

#include "ofdm/fec/ldpc_code.hpp"

namespace ofdm {

// Progressive-edge-growth construction: the last n_checks columns form a
// dual-diagonal (staircase) parity part, and each information column gets
// info_degree edges placed to maximize local girth.
struct PegConfig {
  int n = 1024;
  int n_checks = 341;
  int info_degree = 3;
  std::uint64_t seed = 2024;
};

LdpcCode make_peg_code(const PegConfig& config);

// Length of the shortest cycle in the Tanner graph (0 if acyclic).
int tanner_girth(const LdpcCode& code);

}  // namespace ofdm
