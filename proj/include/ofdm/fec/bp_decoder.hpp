#pragma once

#include <span>

#include "ofdm/fec/ldpc_code.hpp"

namespace ofdm {

struct BpConfig {
  int max_iterations = 40;
  double clip = 20.0;  // bound on every message magnitude
};

struct DecodeResult {
  Bits bits;                 // hard decisions on all n positions
  Eigen::ArrayXd posterior;  // a-posteriori LLRs, positive favors 1
  int iterations = 0;        // 0 when the channel decisions already satisfy H
  bool converged = false;
};

// Sum-product belief propagation, flooding schedule. Input LLRs use the repo
// convention (positive favors bit = 1). Stateless between calls.
class BpDecoder {
 public:
  explicit BpDecoder(const LdpcCode& code, BpConfig config = {});

  DecodeResult decode(std::span<const double> llr) const;
  const LdpcCode& code() const { return code_; }

 private:
  const LdpcCode& code_;
  BpConfig config_;
  std::vector<int> check_start_;  // edges of check c: [check_start_[c], check_start_[c+1])
  std::vector<int> edge_var_;
  std::vector<int> var_start_;  // edges of variable v via var_edges_
  std::vector<int> var_edges_;
};

}  // namespace ofdm
