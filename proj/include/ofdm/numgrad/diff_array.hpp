#pragma once

// Define-by-run reverse-mode differentiation over dense double arrays.
//
// A DiffArray is a cheap handle to a graph node. Operations create new nodes
// that keep their parents alive; the graph is released when the last handle
// to the loss goes away. Complex tensors use a trailing dimension of size 2
// holding (real, imaginary), which matches the std::complex<double> layout.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ofdm::ng {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

// Per-parent gradient buffers handed to a backward function. Entries are null
// for parents that do not require gradients.
using GradRefs = std::vector<Eigen::ArrayXd*>;
using BackwardFn = std::function<void(const Eigen::ArrayXd& grad_out, GradRefs& parent_grads)>;

namespace detail {
struct Node;
}

class DiffArray {
 public:
  DiffArray() = default;

  static DiffArray constant(Shape shape, Eigen::ArrayXd values);
  static DiffArray parameter(Shape shape, Eigen::ArrayXd values);
  static DiffArray zeros(Shape shape, bool requires_grad = false);
  static DiffArray scalar(double value, bool requires_grad = false);

  // Builds an operation result. The backward function is dropped when no
  // parent requires gradients.
  static DiffArray from_op(Shape shape, Eigen::ArrayXd values, std::vector<DiffArray> parents,
                           BackwardFn backward);

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;
  const Eigen::ArrayXd& values() const;
  double item() const;
  double operator[](std::size_t i) const { return values()[static_cast<Eigen::Index>(i)]; }

  // Leaf-only mutation, used by optimizers and checkpoint loading.
  Eigen::ArrayXd& leaf_values();

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  // Zeros when no gradient has been accumulated yet.
  Eigen::ArrayXd grad() const;
  void zero_grad();
  std::uint64_t id() const;

  // Detached copy of the values (a fresh constant leaf).
  DiffArray detach() const;

 private:
  friend void backward(const DiffArray& loss);
  explicit DiffArray(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Reverse sweep from a scalar loss. Gradients accumulate into every
// requires-grad node reachable from the loss.
void backward(const DiffArray& loss);

struct NamedArray {
  std::string name;
  DiffArray array;
};
using ParameterList = std::vector<NamedArray>;

void zero_grads(ParameterList& params);

}  // namespace ofdm::ng
