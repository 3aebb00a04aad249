#pragma once

#include <span>
#include <string>

#include "ofdm/baseline/pilots.hpp"
#include "ofdm/core/constellation.hpp"
#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm {

// Centered, unit-power view of raw points [M, 2]:
// C = (C~ - mean) / sqrt(mean|c|^2 - |mean|^2). NumericalError when degenerate.
ng::DiffArray normalize_constellation(const ng::DiffArray& raw);

// 2^m trainable points with a fixed index labeling (point k carries label k).
class TrainableConstellation {
 public:
  TrainableConstellation(const Constellation& init, bool trainable);

  int bits_per_symbol() const { return m_; }
  int size() const { return 1 << m_; }
  bool trainable() const { return raw_.requires_grad(); }
  ng::DiffArray& raw() { return raw_; }
  const ng::DiffArray& raw() const { return raw_; }
  ng::DiffArray normalized() const { return normalize_constellation(raw_); }
  // Normalized points as a plain constellation (for baselines and export).
  Constellation snapshot() const;

 private:
  int m_;
  ng::DiffArray raw_;
};

// Places constellation points into [B, n_S, n_T, 2] grids: indices holds
// B * n_D point indices, frame by frame, following pattern.data_indices();
// pilot REs carry the pilot values.
ng::DiffArray map_symbols(const ng::DiffArray& points, std::span<const int> indices, const PilotPattern& pattern);

// Uncoded convenience: consecutive m-bit groups of `bits` (n_D * m per frame).
ng::DiffArray map_bits(const ng::DiffArray& points, std::span<const std::uint8_t> bits, int bits_per_symbol,
                       const PilotPattern& pattern);

// Text export: one line per point, "index,bits,re,im".
void export_constellation(const std::string& path, const Constellation& c);

}  // namespace ofdm
