#include "ofdm/core/diff_ofdm.hpp"

#include "ofdm/core/ofdm.hpp"

namespace ofdm {

using ng::DiffArray;
using ng::GradRefs;
using ng::Shape;

namespace {

void check_grids(const DiffArray& a, const GridConfig& cfg, const char* op) {
  if (a.rank() != 4 || a.dim(1) != std::size_t(cfg.n_subcarriers) || a.dim(2) != std::size_t(cfg.n_symbols) ||
      a.dim(3) != 2) {
    throw ShapeError(std::string(op) + ": expected [B," + std::to_string(cfg.n_subcarriers) + "," +
                     std::to_string(cfg.n_symbols) + ",2], got " + ng::to_string(a.shape()));
  }
}

void check_samples(const DiffArray& a, Eigen::Index length, const char* op) {
  if (a.rank() != 3 || a.dim(2) != 2 || (length >= 0 && a.dim(1) != std::size_t(length))) {
    throw ShapeError(std::string(op) + ": expected [B," + (length >= 0 ? std::to_string(length) : "L") +
                     ",2], got " + ng::to_string(a.shape()));
  }
}

// Row-major [rows, cols] complex slice <-> Eigen column-major matrix.
CMatrixXd read_grid(const Eigen::ArrayXd& v, Eigen::Index offset, int rows, int cols) {
  CMatrixXd m(rows, cols);
  for (int s = 0; s < rows; ++s)
    for (int q = 0; q < cols; ++q) {
      const Eigen::Index k = offset + 2 * (s * cols + q);
      m(s, q) = cd(v[k], v[k + 1]);
    }
  return m;
}

void write_grid(Eigen::ArrayXd& v, Eigen::Index offset, const CMatrixXd& m, bool accumulate) {
  const auto rows = m.rows(), cols = m.cols();
  for (Eigen::Index s = 0; s < rows; ++s)
    for (Eigen::Index q = 0; q < cols; ++q) {
      const Eigen::Index k = offset + 2 * (s * cols + q);
      if (accumulate) {
        v[k] += m(s, q).real();
        v[k + 1] += m(s, q).imag();
      } else {
        v[k] = m(s, q).real();
        v[k + 1] = m(s, q).imag();
      }
    }
}

Eigen::Map<const CVectorXd> as_complex(const Eigen::ArrayXd& v, Eigen::Index offset, Eigen::Index n) {
  return {reinterpret_cast<const cd*>(v.data() + offset), n};
}

Eigen::Map<CVectorXd> as_complex(Eigen::ArrayXd& v, Eigen::Index offset, Eigen::Index n) {
  return {reinterpret_cast<cd*>(v.data() + offset), n};
}

}  // namespace

DiffArray modulate(const DiffArray& grids, const GridConfig& cfg) {
  cfg.validate();
  check_grids(grids, cfg, "modulate");
  const auto batch = static_cast<Eigen::Index>(grids.dim(0));
  const int ns = cfg.n_subcarriers, nt = cfg.n_symbols, ncp = cfg.cp_length, len = cfg.symbol_length();
  const Eigen::Index frame = cfg.frame_length(), grid_size = 2 * ns * nt;
  Eigen::ArrayXd out(batch * frame * 2);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const CVectorXd x = modulate<double>(read_grid(grids.values(), b * grid_size, ns, nt), cfg);
    as_complex(out, b * frame * 2, frame) = x;
  }
  return DiffArray::from_op(
      {std::size_t(batch), std::size_t(frame), 2}, std::move(out), {grids},
      [batch, ns, nt, ncp, len, frame, grid_size](const Eigen::ArrayXd& g, GradRefs& refs) {
        if (!refs[0]) return;
        const CMatrixXd& f = dft_matrix(ns);
        for (Eigen::Index b = 0; b < batch; ++b) {
          const auto gx = as_complex(g, b * frame * 2, frame);
          CMatrixXd gtime(ns, nt);
          for (int q = 0; q < nt; ++q) {
            gtime.col(q) = gx.segment(q * len + ncp, ns);
            gtime.col(q).tail(ncp) += gx.segment(q * len, ncp);
          }
          write_grid(*refs[0], b * grid_size, f * gtime, true);
        }
      });
}

DiffArray demodulate(const DiffArray& samples, const GridConfig& cfg) {
  cfg.validate();
  check_samples(samples, cfg.frame_length(), "demodulate");
  const auto batch = static_cast<Eigen::Index>(samples.dim(0));
  const int ns = cfg.n_subcarriers, nt = cfg.n_symbols, ncp = cfg.cp_length, len = cfg.symbol_length();
  const Eigen::Index frame = cfg.frame_length(), grid_size = 2 * ns * nt;
  Eigen::ArrayXd out(batch * grid_size);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const CVectorXd y = as_complex(samples.values(), b * frame * 2, frame);
    write_grid(out, b * grid_size, demodulate<double>(y, cfg), false);
  }
  return DiffArray::from_op(
      {std::size_t(batch), std::size_t(ns), std::size_t(nt), 2}, std::move(out), {samples},
      [batch, ns, nt, ncp, len, frame, grid_size](const Eigen::ArrayXd& g, GradRefs& refs) {
        if (!refs[0]) return;
        const CMatrixXd& f = dft_matrix(ns);
        for (Eigen::Index b = 0; b < batch; ++b) {
          const CMatrixXd gbody = f.adjoint() * read_grid(g, b * grid_size, ns, nt);
          auto gy = as_complex(*refs[0], b * frame * 2, frame);
          for (int q = 0; q < nt; ++q) gy.segment(q * len + ncp, ns) += gbody.col(q);
        }
      });
}

DiffArray apply_channel(const DiffArray& samples, const std::vector<ChannelRealization>& channels) {
  check_samples(samples, -1, "apply_channel");
  const auto batch = static_cast<Eigen::Index>(samples.dim(0));
  const auto frame = static_cast<Eigen::Index>(samples.dim(1));
  if (static_cast<Eigen::Index>(channels.size()) != batch) {
    throw ShapeError("apply_channel: " + std::to_string(channels.size()) + " realizations for batch of " +
                     std::to_string(batch));
  }
  auto taps = std::make_shared<std::vector<CMatrixXd>>();
  Eigen::ArrayXd out(samples.size());
  for (Eigen::Index b = 0; b < batch; ++b) {
    ChannelRealization noiseless = channels[b];
    noiseless.noise_variance = 0.0;
    const CVectorXd x = as_complex(samples.values(), b * frame * 2, frame);
    as_complex(out, b * frame * 2, frame) = apply_channel(x, noiseless);
    taps->push_back(channels[b].taps.topRows(frame));
  }
  return DiffArray::from_op(samples.shape(), std::move(out), {samples},
                            [taps, batch, frame](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (!refs[0]) return;
                              for (Eigen::Index b = 0; b < batch; ++b) {
                                const CMatrixXd& h = (*taps)[b];
                                const auto gy = as_complex(g, b * frame * 2, frame);
                                auto gx = as_complex(*refs[0], b * frame * 2, frame);
                                const Eigen::Index nr = h.cols();
                                for (Eigen::Index t = 0; t < frame; ++t) {
                                  cd acc = 0.0;
                                  for (Eigen::Index i = 0; i < nr && t + i < frame; ++i)
                                    acc += std::conj(h(t + i, i)) * gy[t + i];
                                  gx[t] += acc;
                                }
                              }
                            });
}

DiffArray grids_to_array(const std::vector<CMatrixXd>& grids) {
  if (grids.empty()) throw ShapeError("grids_to_array: empty batch");
  const auto rows = grids[0].rows(), cols = grids[0].cols();
  Eigen::ArrayXd v(static_cast<Eigen::Index>(grids.size()) * rows * cols * 2);
  for (std::size_t b = 0; b < grids.size(); ++b) {
    if (grids[b].rows() != rows || grids[b].cols() != cols) throw ShapeError("grids_to_array: ragged batch");
    write_grid(v, static_cast<Eigen::Index>(b) * rows * cols * 2, grids[b], false);
  }
  return DiffArray::constant({grids.size(), std::size_t(rows), std::size_t(cols), 2}, std::move(v));
}

CMatrixXd array_to_grid(const DiffArray& grids, std::size_t batch_index) {
  if (grids.rank() != 4 || grids.dim(3) != 2 || batch_index >= grids.dim(0)) {
    throw ShapeError("array_to_grid: bad shape " + ng::to_string(grids.shape()) + " or index");
  }
  const int rows = static_cast<int>(grids.dim(1)), cols = static_cast<int>(grids.dim(2));
  return read_grid(grids.values(), static_cast<Eigen::Index>(batch_index) * rows * cols * 2, rows, cols);
}

DiffArray samples_to_array(const std::vector<CVectorXd>& samples) {
  if (samples.empty()) throw ShapeError("samples_to_array: empty batch");
  const auto len = samples[0].size();
  Eigen::ArrayXd v(static_cast<Eigen::Index>(samples.size()) * len * 2);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    if (samples[b].size() != len) throw ShapeError("samples_to_array: ragged batch");
    as_complex(v, static_cast<Eigen::Index>(b) * len * 2, len) = samples[b];
  }
  return DiffArray::constant({samples.size(), std::size_t(len), 2}, std::move(v));
}

CVectorXd array_to_samples(const DiffArray& samples, std::size_t batch_index) {
  check_samples(samples, -1, "array_to_samples");
  if (batch_index >= samples.dim(0)) throw ShapeError("array_to_samples: index out of range");
  const auto len = static_cast<Eigen::Index>(samples.dim(1));
  return as_complex(samples.values(), static_cast<Eigen::Index>(batch_index) * len * 2, len);
}

}  // namespace ofdm
