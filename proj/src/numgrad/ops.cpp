#include "ofdm/numgrad/ops.hpp"

#include <cmath>

#include "ofdm/errors.hpp"

namespace ofdm::ng {

namespace {

enum class Broadcast { same, rows, scalar };

Broadcast classify(const DiffArray& a, const DiffArray& b, const char* op) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (sa == sb) return Broadcast::same;
  if (b.size() == 1) return Broadcast::scalar;
  if (sa.size() == sb.size() + 1 && std::equal(sb.begin(), sb.end(), sa.begin() + 1)) return Broadcast::rows;
  throw ShapeError(std::string(op) + ": cannot combine shapes " + to_string(sa) + " and " + to_string(sb));
}

// Expands b to a's element count according to the broadcast mode.
Eigen::ArrayXd expand(const Eigen::ArrayXd& b, Broadcast mode, Eigen::Index n) {
  switch (mode) {
    case Broadcast::same:
      return b;
    case Broadcast::scalar:
      return Eigen::ArrayXd::Constant(n, b[0]);
    case Broadcast::rows:
      return b.replicate(n / b.size(), 1);
  }
  return b;
}

// b laid out at a's size without copying when the shapes already agree.
class Expanded {
 public:
  Expanded(const Eigen::ArrayXd& b, Broadcast mode, Eigen::Index n)
      : owned_(mode == Broadcast::same ? Eigen::ArrayXd() : expand(b, mode, n)),
        ref_(mode == Broadcast::same ? &b : &owned_) {}
  const Eigen::ArrayXd& get() const { return *ref_; }

 private:
  Eigen::ArrayXd owned_;
  const Eigen::ArrayXd* ref_;
};

// Folds a gradient of a's size back onto b's layout.
void reduce_into(Eigen::ArrayXd& dst, const Eigen::ArrayXd& g, Broadcast mode) {
  switch (mode) {
    case Broadcast::same:
      dst += g;
      break;
    case Broadcast::scalar:
      dst[0] += g.sum();
      break;
    case Broadcast::rows: {
      const Eigen::Index inner = dst.size();
      Eigen::Map<const Eigen::MatrixXd> m(g.data(), inner, g.size() / inner);
      dst += m.rowwise().sum().array();
      break;
    }
  }
}

// Backward closures hold parent handles rather than value copies; parents
// are immutable until the sweep finishes.
template <typename Fwd, typename Bwd>
DiffArray unary(const DiffArray& a, Fwd fwd, Bwd bwd) {
  return DiffArray::from_op(a.shape(), fwd(a.values()), {a}, [a, bwd](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (refs[0]) *refs[0] += bwd(g, a.values());
  });
}

void require_complex(const DiffArray& a, const char* op) {
  if (a.rank() == 0 || a.shape().back() != 2) {
    throw ShapeError(std::string(op) + ": trailing dimension must be 2 (real, imag), got shape " +
                     to_string(a.shape()));
  }
}

}  // namespace

DiffArray add(const DiffArray& a, const DiffArray& b) {
  const auto mode = classify(a, b, "add");
  Eigen::ArrayXd out = a.values() + Expanded(b.values(), mode, a.values().size()).get();
  return DiffArray::from_op(a.shape(), std::move(out), {a, b}, [mode](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (refs[0]) *refs[0] += g;
    if (refs[1]) reduce_into(*refs[1], g, mode);
  });
}

DiffArray sub(const DiffArray& a, const DiffArray& b) {
  const auto mode = classify(a, b, "sub");
  Eigen::ArrayXd out = a.values() - Expanded(b.values(), mode, a.values().size()).get();
  return DiffArray::from_op(a.shape(), std::move(out), {a, b}, [mode](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (refs[0]) *refs[0] += g;
    if (refs[1]) reduce_into(*refs[1], -g, mode);
  });
}

DiffArray mul(const DiffArray& a, const DiffArray& b) {
  const auto mode = classify(a, b, "mul");
  Eigen::ArrayXd out = a.values() * Expanded(b.values(), mode, a.values().size()).get();
  return DiffArray::from_op(a.shape(), std::move(out), {a, b},
                            [mode, a, b](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (refs[0]) *refs[0] += g * Expanded(b.values(), mode, g.size()).get();
                              if (refs[1]) reduce_into(*refs[1], g * a.values(), mode);
                            });
}

DiffArray div(const DiffArray& a, const DiffArray& b) {
  const auto mode = classify(a, b, "div");
  const Expanded bx(b.values(), mode, a.values().size());
  for (Eigen::Index i = 0; i < bx.get().size(); ++i) {
    if (bx.get()[i] == 0.0) throw DomainError("div: zero divisor", static_cast<std::size_t>(i));
  }
  Eigen::ArrayXd out = a.values() / bx.get();
  return DiffArray::from_op(a.shape(), std::move(out), {a, b}, [mode, a, b](const Eigen::ArrayXd& g, GradRefs& refs) {
    const Expanded e(b.values(), mode, g.size());
    if (refs[0]) *refs[0] += g / e.get();
    if (refs[1]) reduce_into(*refs[1], -g * a.values() / e.get().square(), mode);
  });
}

DiffArray neg(const DiffArray& a) { return scale(a, -1.0); }

DiffArray scale(const DiffArray& a, double factor) {
  return DiffArray::from_op(a.shape(), a.values() * factor, {a},
                            [factor](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (refs[0]) *refs[0] += g * factor;
                            });
}

DiffArray relu(const DiffArray& a) {
  return unary(
      a, [](const Eigen::ArrayXd& x) -> Eigen::ArrayXd { return x.max(0.0); },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        return (x > 0.0).select(g, 0.0);
      });
}

DiffArray exp(const DiffArray& a) {
  return unary(
      a, [](const Eigen::ArrayXd& x) -> Eigen::ArrayXd { return x.exp(); },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        return g * x.exp();
      });
}

DiffArray log(const DiffArray& a) {
  const auto& x = a.values();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("log: non-positive input " + std::to_string(x[i]), static_cast<std::size_t>(i));
  }
  return unary(
      a, [](const Eigen::ArrayXd& v) -> Eigen::ArrayXd { return v.log(); },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& v) -> Eigen::ArrayXd {
        return g / v;
      });
}

DiffArray sqrt(const DiffArray& a) {
  const auto& x = a.values();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) throw DomainError("sqrt: negative input " + std::to_string(x[i]), static_cast<std::size_t>(i));
  }
  return unary(
      a, [](const Eigen::ArrayXd& v) -> Eigen::ArrayXd { return v.sqrt(); },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        return g * 0.5 / x.sqrt();
      });
}

DiffArray square(const DiffArray& a) {
  return unary(
      a, [](const Eigen::ArrayXd& x) -> Eigen::ArrayXd { return x.square(); },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        return 2.0 * g * x;
      });
}

DiffArray softplus(const DiffArray& a) {
  return unary(
      a,
      [](const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        return x.max(0.0) + (-x.abs()).exp().log1p();
      },
      [](const Eigen::ArrayXd& g, const Eigen::ArrayXd& x) -> Eigen::ArrayXd {
        // sigmoid(x), split by sign to avoid overflow
        Eigen::ArrayXd e = (-x.abs()).exp();
        Eigen::ArrayXd s = (x >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e));
        return g * s;
      });
}

DiffArray sum(const DiffArray& a) {
  return DiffArray::from_op({1}, Eigen::ArrayXd::Constant(1, a.values().sum()), {a},
                            [](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (refs[0]) *refs[0] += g[0];
                            });
}

DiffArray mean(const DiffArray& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

DiffArray sum_rows(const DiffArray& a) {
  if (a.rank() < 2) throw ShapeError("sum_rows needs rank >= 2, got " + to_string(a.shape()));
  Shape out_shape(a.shape().begin() + 1, a.shape().end());
  const auto inner = static_cast<Eigen::Index>(element_count(out_shape));
  const auto rows = static_cast<Eigen::Index>(a.dim(0));
  Eigen::Map<const Eigen::MatrixXd> m(a.values().data(), inner, rows);
  Eigen::ArrayXd out = m.rowwise().sum().array();
  return DiffArray::from_op(std::move(out_shape), std::move(out), {a},
                            [rows](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (refs[0]) *refs[0] += g.replicate(rows, 1);
                            });
}

DiffArray mean_rows(const DiffArray& a) { return scale(sum_rows(a), 1.0 / static_cast<double>(a.dim(0))); }

DiffArray reshape(const DiffArray& a, Shape shape) {
  if (element_count(shape) != a.size()) {
    throw ShapeError("reshape: " + to_string(a.shape()) + " -> " + to_string(shape) + " changes element count");
  }
  return DiffArray::from_op(std::move(shape), a.values(), {a}, [](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (refs[0]) *refs[0] += g;
  });
}

DiffArray gather_rows(const DiffArray& table, std::span<const int> indices) {
  if (table.rank() < 1) throw ShapeError("gather_rows on rank-0 array");
  const auto rows = static_cast<int>(table.dim(0));
  const auto inner = static_cast<Eigen::Index>(table.size() / table.dim(0));
  std::vector<int> idx(indices.begin(), indices.end());
  Eigen::ArrayXd out(static_cast<Eigen::Index>(idx.size()) * inner);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= rows) {
      throw ShapeError("gather_rows: index " + std::to_string(idx[r]) + " outside [0," + std::to_string(rows) + ")");
    }
    out.segment(static_cast<Eigen::Index>(r) * inner, inner) = table.values().segment(idx[r] * inner, inner);
  }
  Shape shape = table.shape();
  shape[0] = idx.size();
  return DiffArray::from_op(std::move(shape), std::move(out), {table},
                            [idx = std::move(idx), inner](const Eigen::ArrayXd& g, GradRefs& refs) {
                              if (!refs[0]) return;
                              for (std::size_t r = 0; r < idx.size(); ++r) {
                                refs[0]->segment(idx[r] * inner, inner) +=
                                    g.segment(static_cast<Eigen::Index>(r) * inner, inner);
                              }
                            });
}

DiffArray cmul(const DiffArray& a, const DiffArray& b) {
  require_complex(a, "cmul");
  require_complex(b, "cmul");
  const auto mode = classify(a, b, "cmul");
  if (mode == Broadcast::scalar) throw ShapeError("cmul: scalar operand has no imaginary part");
  const Eigen::ArrayXd& av = a.values();
  const Expanded bexp(b.values(), mode, av.size());
  const Eigen::ArrayXd& bx = bexp.get();
  const Eigen::Index n = av.size() / 2;
  Eigen::ArrayXd out(av.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ar = av[2 * k], ai = av[2 * k + 1], br = bx[2 * k], bi = bx[2 * k + 1];
    out[2 * k] = ar * br - ai * bi;
    out[2 * k + 1] = ar * bi + ai * br;
  }
  return DiffArray::from_op(a.shape(), std::move(out), {a, b},
                            [mode, a, b, n](const Eigen::ArrayXd& g, GradRefs& refs) {
                              const Eigen::ArrayXd& av = a.values();
                              const Expanded bexp(b.values(), mode, av.size());
                              const Eigen::ArrayXd& bx = bexp.get();
                              // For a real loss, dL/da = g * conj(b) in complex form.
                              if (refs[0]) {
                                auto& ga = *refs[0];
                                for (Eigen::Index k = 0; k < n; ++k) {
                                  const double gr = g[2 * k], gi = g[2 * k + 1];
                                  ga[2 * k] += gr * bx[2 * k] + gi * bx[2 * k + 1];
                                  ga[2 * k + 1] += gi * bx[2 * k] - gr * bx[2 * k + 1];
                                }
                              }
                              if (refs[1]) {
                                Eigen::ArrayXd gb(g.size());
                                for (Eigen::Index k = 0; k < n; ++k) {
                                  const double gr = g[2 * k], gi = g[2 * k + 1];
                                  gb[2 * k] = gr * av[2 * k] + gi * av[2 * k + 1];
                                  gb[2 * k + 1] = gi * av[2 * k] - gr * av[2 * k + 1];
                                }
                                reduce_into(*refs[1], gb, mode);
                              }
                            });
}

DiffArray cconj(const DiffArray& a) {
  require_complex(a, "cconj");
  Eigen::ArrayXd sign(a.size());
  for (Eigen::Index k = 0; k < sign.size(); ++k) sign[k] = (k % 2 == 0) ? 1.0 : -1.0;
  return DiffArray::from_op(a.shape(), a.values() * sign, {a}, [sign](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (refs[0]) *refs[0] += g * sign;
  });
}

DiffArray cabs2(const DiffArray& a) {
  require_complex(a, "cabs2");
  Shape shape(a.shape().begin(), a.shape().end() - 1);
  if (shape.empty()) shape = {1};
  const Eigen::ArrayXd& av = a.values();
  const Eigen::Index n = av.size() / 2;
  Eigen::ArrayXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out[k] = av[2 * k] * av[2 * k] + av[2 * k + 1] * av[2 * k + 1];
  return DiffArray::from_op(std::move(shape), std::move(out), {a}, [a, n](const Eigen::ArrayXd& g, GradRefs& refs) {
    if (!refs[0]) return;
    const Eigen::ArrayXd& av = a.values();
    for (Eigen::Index k = 0; k < n; ++k) {
      (*refs[0])[2 * k] += 2.0 * g[k] * av[2 * k];
      (*refs[0])[2 * k + 1] += 2.0 * g[k] * av[2 * k + 1];
    }
  });
}

}  // namespace ofdm::ng
