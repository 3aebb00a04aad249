#include "ofdm/numgrad/conv.hpp"

#include <algorithm>

#include "ofdm/errors.hpp"

namespace ofdm::ng {

namespace {

struct Layout {
  Eigen::Index batch, height, width, channels;
  bool squeezed;  // input was rank 3
};

Layout activation_layout(const DiffArray& x, const char* op) {
  const auto& s = x.shape();
  if (s.size() == 3) {
    return {1, static_cast<Eigen::Index>(s[0]), static_cast<Eigen::Index>(s[1]), static_cast<Eigen::Index>(s[2]), true};
  }
  if (s.size() == 4) {
    return {static_cast<Eigen::Index>(s[0]), static_cast<Eigen::Index>(s[1]), static_cast<Eigen::Index>(s[2]),
            static_cast<Eigen::Index>(s[3]), false};
  }
  throw ShapeError(std::string(op) + ": expected [B,H,W,C] or [H,W,C], got " + to_string(s));
}

Shape with_channels(const Layout& l, Eigen::Index c) {
  if (l.squeezed) return {std::size_t(l.height), std::size_t(l.width), std::size_t(c)};
  return {std::size_t(l.batch), std::size_t(l.height), std::size_t(l.width), std::size_t(c)};
}

// Visits every (batch, output row, kernel tap) with the contiguous run of
// output columns whose shifted input column lies inside the image. Taps are
// innermost so one output row stays in cache across the kernel.
template <typename F>
void for_each_tap_run(const Layout& l, Eigen::Index kh, Eigen::Index kw, Dilation d, F&& f) {
  const Eigen::Index rh = (kh - 1) / 2, rw = (kw - 1) / 2;
  const auto dh = static_cast<Eigen::Index>(d.rows), dw = static_cast<Eigen::Index>(d.cols);
  for (Eigen::Index b = 0; b < l.batch; ++b) {
    for (Eigen::Index h = 0; h < l.height; ++h) {
      for (Eigen::Index i = 0; i < kh; ++i) {
        const Eigen::Index hin = h + (i - rh) * dh;
        if (hin < 0 || hin >= l.height) continue;
        for (Eigen::Index j = 0; j < kw; ++j) {
          const Eigen::Index ow = (j - rw) * dw;
          const Eigen::Index w0 = std::max<Eigen::Index>(0, -ow);
          const Eigen::Index w1 = std::min(l.width, l.width - ow);
          if (w0 >= w1) continue;
          const Eigen::Index out_base = ((b * l.height + h) * l.width + w0) * l.channels;
          const Eigen::Index in_base = ((b * l.height + hin) * l.width + w0 + ow) * l.channels;
          f(i, j, out_base, in_base, (w1 - w0));
        }
      }
    }
  }
}

}  // namespace

DiffArray depthwise_conv2d(const DiffArray& input, const DiffArray& kernel, Dilation dilation) {
  const Layout l = activation_layout(input, "depthwise_conv2d");
  const auto& ks = kernel.shape();
  if (ks.size() != 3) throw ShapeError("depthwise_conv2d: kernel must be [KH,KW,C], got " + to_string(ks));
  if (static_cast<Eigen::Index>(ks[2]) != l.channels) {
    throw ShapeError("depthwise_conv2d: kernel channels " + std::to_string(ks[2]) + " != input channels " +
                     std::to_string(l.channels) + " (input " + to_string(input.shape()) + ")");
  }
  if (ks[0] % 2 == 0 || ks[1] % 2 == 0) {
    throw ShapeError("depthwise_conv2d: kernel spatial size must be odd, got " + to_string(ks));
  }
  if (dilation.rows == 0 || dilation.cols == 0) throw ShapeError("depthwise_conv2d: dilation must be positive");
  const auto kh = static_cast<Eigen::Index>(ks[0]), kw = static_cast<Eigen::Index>(ks[1]);
  const Eigen::Index c = l.channels;

  // Kernel taps tiled over a full row of columns for vectorized runs.
  auto tiled = [c, w = l.width](const Eigen::ArrayXd& k, Eigen::Index i, Eigen::Index j, Eigen::Index kwid) {
    return Eigen::ArrayXd(k.segment((i * kwid + j) * c, c).replicate(w, 1));
  };

  const Eigen::ArrayXd& x = input.values();
  const Eigen::ArrayXd& k = kernel.values();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(x.size());
  std::vector<Eigen::ArrayXd> taps;
  for (Eigen::Index i = 0; i < kh; ++i)
    for (Eigen::Index j = 0; j < kw; ++j) taps.push_back(tiled(k, i, j, kw));

  for_each_tap_run(l, kh, kw, dilation, [&](Eigen::Index i, Eigen::Index j, Eigen::Index ob, Eigen::Index ib, Eigen::Index run) {
    const Eigen::Index len = run * c;
    out.segment(ob, len) += x.segment(ib, len) * taps[i * kw + j].head(len);
  });

  return DiffArray::from_op(
      input.shape(), std::move(out), {input, kernel},
      [l, kh, kw, dilation, input, taps = std::move(taps)](const Eigen::ArrayXd& g, GradRefs& refs) {
        const Eigen::Index c = l.channels;
        const Eigen::ArrayXd& xv = input.values();
        std::vector<Eigen::ArrayXd> acc;
        if (refs[1]) acc.assign(kh * kw, Eigen::ArrayXd::Zero(l.width * c));
        for_each_tap_run(l, kh, kw, dilation,
                         [&](Eigen::Index i, Eigen::Index j, Eigen::Index ob, Eigen::Index ib, Eigen::Index run) {
                           const Eigen::Index len = run * c;
                           if (refs[0]) refs[0]->segment(ib, len) += g.segment(ob, len) * taps[i * kw + j].head(len);
                           if (refs[1]) acc[i * kw + j].head(len) += g.segment(ob, len) * xv.segment(ib, len);
                         });
        if (refs[1]) {
          for (Eigen::Index t = 0; t < kh * kw; ++t) {
            Eigen::Map<const Eigen::MatrixXd> m(acc[t].data(), c, l.width);
            refs[1]->segment(t * c, c) += m.rowwise().sum().array();
          }
        }
      });
}

DiffArray pointwise_conv2d(const DiffArray& input, const DiffArray& kernel) {
  const Layout l = activation_layout(input, "pointwise_conv2d");
  const auto& ks = kernel.shape();
  if (ks.size() != 2 || static_cast<Eigen::Index>(ks[0]) != l.channels) {
    throw ShapeError("pointwise_conv2d: kernel " + to_string(ks) + " incompatible with input " +
                     to_string(input.shape()) + " (expected [" + std::to_string(l.channels) + ",C_out])");
  }
  const auto cin = l.channels, cout = static_cast<Eigen::Index>(ks[1]);
  const Eigen::Index n = l.batch * l.height * l.width;
  Eigen::Map<const Eigen::MatrixXd> xt(input.values().data(), cin, n);
  Eigen::Map<const Eigen::MatrixXd> pt(kernel.values().data(), cout, cin);
  Eigen::MatrixXd yt = pt * xt;
  Eigen::ArrayXd out = Eigen::Map<const Eigen::ArrayXd>(yt.data(), yt.size());

  return DiffArray::from_op(with_channels(l, cout), std::move(out), {input, kernel},
                            [cin, cout, n, input, kernel](const Eigen::ArrayXd& g, GradRefs& refs) {
                              const Eigen::ArrayXd& xv = input.values();
                              const Eigen::ArrayXd& kv = kernel.values();
                              Eigen::Map<const Eigen::MatrixXd> gt(g.data(), cout, n);
                              if (refs[0]) {
                                Eigen::Map<const Eigen::MatrixXd> pt(kv.data(), cout, cin);
                                Eigen::Map<Eigen::MatrixXd> gx(refs[0]->data(), cin, n);
                                gx.noalias() += pt.transpose() * gt;
                              }
                              if (refs[1]) {
                                Eigen::Map<const Eigen::MatrixXd> xt(xv.data(), cin, n);
                                Eigen::Map<Eigen::MatrixXd> gp(refs[1]->data(), cout, cin);
                                gp.noalias() += gt * xt.transpose();
                              }
                            });
}

DiffArray add_channel_bias(const DiffArray& input, const DiffArray& bias) {
  const Layout l = activation_layout(input, "add_channel_bias");
  if (bias.rank() != 1 || static_cast<Eigen::Index>(bias.dim(0)) != l.channels) {
    throw ShapeError("add_channel_bias: bias " + to_string(bias.shape()) + " does not match input " +
                     to_string(input.shape()));
  }
  const Eigen::Index c = l.channels, n = l.batch * l.height * l.width;
  Eigen::ArrayXd out = input.values();
  Eigen::Map<Eigen::MatrixXd>(out.data(), c, n).colwise() += bias.values().matrix();
  return DiffArray::from_op(input.shape(), std::move(out), {input, bias},
                            [c, n](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (refs[0]) *refs[0] += g;
                              if (refs[1]) {
                                Eigen::Map<const Eigen::MatrixXd> gm(g.data(), c, n);
                                *refs[1] += gm.rowwise().sum().array();
                              }
                            });
}

DiffArray layer_norm_channels(const DiffArray& input, const DiffArray& gamma, const DiffArray& beta, double eps) {
  const Layout l = activation_layout(input, "layer_norm_channels");
  for (const DiffArray* p : {&gamma, &beta}) {
    if (p->rank() != 1 || static_cast<Eigen::Index>(p->dim(0)) != l.channels) {
      throw ShapeError("layer_norm_channels: affine " + to_string(p->shape()) + " does not match input " +
                       to_string(input.shape()));
    }
  }
  if (!(eps > 0.0)) throw DomainError("layer_norm_channels: eps must be positive", 0);
  const Eigen::Index c = l.channels, n = l.batch * l.height * l.width;
  Eigen::Map<const Eigen::MatrixXd> x(input.values().data(), c, n);
  Eigen::MatrixXd xhat = x.rowwise() - x.colwise().mean();
  const Eigen::RowVectorXd inv =
      ((xhat.array().square().colwise().sum() / static_cast<double>(c)) + eps).rsqrt().matrix();
  xhat = xhat.array().rowwise() * inv.array();
  Eigen::ArrayXd out(c * n);
  Eigen::Map<Eigen::MatrixXd> om(out.data(), c, n);
  om = (xhat.array().colwise() * gamma.values()).colwise() + beta.values();
  return DiffArray::from_op(input.shape(), std::move(out), {input, gamma, beta},
                            [c, n, xhat = std::move(xhat), inv, g0 = gamma.values()](const Eigen::ArrayXd& g,
                                                                                     GradRefs& refs) {
                              Eigen::Map<const Eigen::MatrixXd> gm(g.data(), c, n);
                              if (refs[0]) {
                                const Eigen::MatrixXd dxh = (gm.array().colwise() * g0).matrix();
                                const Eigen::RowVectorXd m1 = dxh.colwise().mean();
                                const Eigen::RowVectorXd m2 =
                                    (dxh.array() * xhat.array()).colwise().sum().matrix() / static_cast<double>(c);
                                Eigen::MatrixXd dx = dxh.rowwise() - m1;
                                dx -= (xhat.array().rowwise() * m2.array()).matrix();
                                dx = dx.array().rowwise() * inv.array();
                                *refs[0] += Eigen::Map<const Eigen::ArrayXd>(dx.data(), c * n);
                              }
                              if (refs[1]) *refs[1] += (gm.array() * xhat.array()).rowwise().sum();
                              if (refs[2]) *refs[2] += gm.rowwise().sum().array();
                            });
}

DiffArray conv2d_separable(const DiffArray& input, const DiffArray& depthwise, const DiffArray& pointwise,
                           Dilation dilation) {
  return pointwise_conv2d(depthwise_conv2d(input, depthwise, dilation), pointwise);
}

}  // namespace ofdm::ng
