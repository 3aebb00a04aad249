#include "ofdm/e2e/loss.hpp"

#include <cmath>

#include "ofdm/errors.hpp"

namespace ofdm {

ng::DiffArray total_bce(const ng::DiffArray& llrs, std::span<const std::uint8_t> bits,
                        std::span<const int> data_indices) {
  if (llrs.rank() != 4) throw ShapeError("total_bce expects [B, n_S, n_T, m], got " + ng::to_string(llrs.shape()));
  const std::size_t B = llrs.dim(0), nS = llrs.dim(1), nT = llrs.dim(2), m = llrs.dim(3);
  const std::size_t nd = data_indices.size();
  if (bits.size() != B * nd * m) {
    throw ShapeError("total_bce: expected " + std::to_string(B * nd * m) + " bits, got " + std::to_string(bits.size()));
  }
  // Position of every labeled LLR in the flat tensor, and its sign y = 2b - 1.
  std::vector<std::size_t> pos(bits.size());
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t j = 0; j < nd; ++j) {
      const auto k = static_cast<std::size_t>(data_indices[j]);
      if (k >= nS * nT) throw ShapeError("total_bce: data index out of range");
      const std::size_t base = ((b * nS + k % nS) * nT + k / nS) * m;
      for (std::size_t i = 0; i < m; ++i) pos[(b * nd + j) * m + i] = base + i;
    }
  const auto& v = llrs.values();
  const double inv = 1.0 / (static_cast<double>(B) * std::log(2.0));
  double total = 0.0;
  for (std::size_t t = 0; t < pos.size(); ++t) {
    const double l = v[static_cast<Eigen::Index>(pos[t])];
    if (!std::isfinite(l)) throw NumericalError("total_bce: non-finite LLR at flat index " + std::to_string(pos[t]));
    const double x = bits[t] ? -l : l;  // softplus(x), x = -y * llr
    total += x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  }
  Eigen::ArrayXd out(1);
  out[0] = total * inv;
  std::vector<std::uint8_t> y(bits.begin(), bits.end());
  return ng::DiffArray::from_op({1}, std::move(out), {llrs},
                                [pos = std::move(pos), y = std::move(y), inv, llrs](const Eigen::ArrayXd& g,
                                                                                 ng::GradRefs& grads) {
                                  Eigen::ArrayXd& gl = *grads[0];
                                  const Eigen::ArrayXd& v = llrs.values();
                                  for (std::size_t t = 0; t < pos.size(); ++t) {
                                    const auto p = static_cast<Eigen::Index>(pos[t]);
                                    const double sign = y[t] ? -1.0 : 1.0;
                                    const double x = sign * v[p];
                                    const double sig = 1.0 / (1.0 + std::exp(-x));  // d softplus / dx
                                    gl[p] += g[0] * inv * sign * sig;
                                  }
                                });
}

}  // namespace ofdm
