#include "ofdm/e2e/constellation_layer.hpp"

#include <cstdio>
#include <fstream>

#include "ofdm/errors.hpp"
#include "ofdm/numgrad/ops.hpp"

namespace ofdm {

using ng::DiffArray;

DiffArray normalize_constellation(const DiffArray& raw) {
  if (raw.rank() != 2 || raw.dim(1) != 2) {
    throw ShapeError("constellation must be [M, 2], got " + ng::to_string(raw.shape()));
  }
  const DiffArray centered = ng::sub(raw, ng::mean_rows(raw));
  const DiffArray power = ng::mean(ng::cabs2(centered));
  if (!(power.item() > 1e-24)) throw NumericalError("degenerate constellation: all points coincide");
  return ng::div(centered, ng::sqrt(power));
}

TrainableConstellation::TrainableConstellation(const Constellation& init, bool trainable)
    : m_(init.bits_per_symbol) {
  init.validate();
  const auto M = static_cast<std::size_t>(init.size());
  Eigen::ArrayXd v(static_cast<Eigen::Index>(2 * M));
  for (std::size_t k = 0; k < M; ++k) {
    v[static_cast<Eigen::Index>(2 * k)] = init.points[static_cast<Eigen::Index>(k)].real();
    v[static_cast<Eigen::Index>(2 * k + 1)] = init.points[static_cast<Eigen::Index>(k)].imag();
  }
  raw_ = trainable ? DiffArray::parameter({M, 2}, std::move(v)) : DiffArray::constant({M, 2}, std::move(v));
}

Constellation TrainableConstellation::snapshot() const {
  const DiffArray c = normalized();
  Constellation out;
  out.bits_per_symbol = m_;
  out.points.resize(size());
  for (int k = 0; k < size(); ++k) out.points[k] = cd(c[2 * k], c[2 * k + 1]);
  return out;
}

DiffArray map_symbols(const DiffArray& points, std::span<const int> indices, const PilotPattern& pattern) {
  const std::vector<int> data = pattern.data_indices();
  const auto nS = static_cast<std::size_t>(pattern.values.rows());
  const auto nT = static_cast<std::size_t>(pattern.values.cols());
  if (data.empty()) throw ShapeError("map_symbols: pattern leaves no data REs");
  if (indices.size() % data.size() != 0) {
    throw ShapeError("map_symbols: " + std::to_string(indices.size()) + " indices is not a multiple of n_D = " +
                     std::to_string(data.size()));
  }
  const std::size_t B = indices.size() / data.size();
  const auto M = static_cast<int>(points.dim(0));
  // Flat [..,2] offsets of each data RE inside one [n_S, n_T, 2] grid.
  std::vector<std::size_t> offset(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto k = static_cast<std::size_t>(data[j]);
    offset[j] = ((k % nS) * nT + k / nS) * 2;
  }
  const std::size_t frame = nS * nT * 2;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(B * frame));
  const auto& pv = points.values();
  for (std::size_t b = 0; b < B; ++b) {
    for (int k : pattern.indices) {
      const auto s = static_cast<std::size_t>(k) % nS, q = static_cast<std::size_t>(k) / nS;
      const cd p = pattern.values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(q));
      out[static_cast<Eigen::Index>(b * frame + (s * nT + q) * 2)] = p.real();
      out[static_cast<Eigen::Index>(b * frame + (s * nT + q) * 2 + 1)] = p.imag();
    }
    for (std::size_t j = 0; j < data.size(); ++j) {
      const int idx = indices[b * data.size() + j];
      if (idx < 0 || idx >= M) throw DomainError("map_symbols: point index out of range", b * data.size() + j);
      out[static_cast<Eigen::Index>(b * frame + offset[j])] = pv[2 * idx];
      out[static_cast<Eigen::Index>(b * frame + offset[j] + 1)] = pv[2 * idx + 1];
    }
  }
  std::vector<int> idx(indices.begin(), indices.end());
  return DiffArray::from_op({B, nS, nT, 2}, std::move(out), {points},
                            [idx = std::move(idx), offset = std::move(offset), frame](const Eigen::ArrayXd& g,
                                                                                      ng::GradRefs& grads) {
                              Eigen::ArrayXd& gp = *grads[0];
                              const std::size_t nd = offset.size();
                              for (std::size_t t = 0; t < idx.size(); ++t) {
                                const std::size_t at = (t / nd) * frame + offset[t % nd];
                                gp[2 * idx[t]] += g[static_cast<Eigen::Index>(at)];
                                gp[2 * idx[t] + 1] += g[static_cast<Eigen::Index>(at + 1)];
                              }
                            });
}

DiffArray map_bits(const DiffArray& points, std::span<const std::uint8_t> bits, int bits_per_symbol,
                   const PilotPattern& pattern) {
  if (points.dim(0) != (std::size_t{1} << bits_per_symbol)) throw ShapeError("map_bits: constellation size != 2^m");
  const auto nd = pattern.data_indices().size();
  if (bits.size() % (nd * static_cast<std::size_t>(bits_per_symbol)) != 0 || bits.empty()) {
    throw ShapeError("map_bits: bit count must be a multiple of n_D * m = " +
                     std::to_string(nd * static_cast<std::size_t>(bits_per_symbol)));
  }
  const auto indices = bits_to_indices(bits, bits_per_symbol);
  return map_symbols(points, indices, pattern);
}

void export_constellation(const std::string& path, const Constellation& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write constellation file '" + path + "'");
  out << "index,bits,re,im\n";
  char buf[96];
  for (int k = 0; k < c.size(); ++k) {
    std::string label;
    for (int i = 0; i < c.bits_per_symbol; ++i) label += static_cast<char>('0' + c.bit(k, i));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", c.points[k].real(), c.points[k].imag());
    out << k << ',' << label << ',' << buf << '\n';
  }
}

}  // namespace ofdm
