#pragma once

#include <span>
#include <string>
#include <vector>

#include "ofdm/types.hpp"

namespace ofdm {

// Binary LDPC code given by a sparse parity-check matrix H. The encoder is
// derived by Gaussian elimination over GF(2) with pivots taken from the right,
// so codes whose trailing columns form a full-rank parity part (the shipped
// PEG code) are systematic on their leading k positions.
class LdpcCode {
 public:
  // checks[c] lists the variable nodes of row c of H.
  LdpcCode(int n, std::vector<std::vector<int>> checks);

  int n() const { return n_; }
  int k() const { return static_cast<int>(info_positions_.size()); }
  int n_checks() const { return static_cast<int>(checks_.size()); }
  int rank() const { return n_ - k(); }
  double rate() const { return static_cast<double>(k()) / n_; }
  int edges() const { return edges_; }

  const std::vector<std::vector<int>>& checks() const { return checks_; }
  const std::vector<std::vector<int>>& variables() const { return vars_; }
  const std::vector<int>& info_positions() const { return info_positions_; }

  Bits encode(std::span<const std::uint8_t> info) const;
  Bits extract_info(std::span<const std::uint8_t> codeword) const;
  bool satisfies(std::span<const std::uint8_t> word) const;
  int unsatisfied_checks(std::span<const std::uint8_t> word) const;

 private:
  int n_;
  int edges_ = 0;
  std::vector<std::vector<int>> checks_;
  std::vector<std::vector<int>> vars_;
  std::vector<int> info_positions_;
  std::vector<int> parity_positions_;
  // Row r: parity bit parity_positions_[r] is the XOR of the info bits set here.
  std::vector<std::vector<std::uint64_t>> parity_rows_;
};

}  // namespace ofdm
