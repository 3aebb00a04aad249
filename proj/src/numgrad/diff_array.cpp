#include "ofdm/numgrad/diff_array.hpp"

#include <atomic>
#include <unordered_set>

#include "ofdm/errors.hpp"

namespace ofdm::ng {

namespace detail {

struct Node {
  Shape shape;
  Eigen::ArrayXd values;
  Eigen::ArrayXd grad;  // empty until first accumulation
  bool requires_grad = false;
  std::uint64_t id = 0;
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;
};

namespace {
std::atomic<std::uint64_t> next_id{1};
}

std::shared_ptr<Node> make_node(Shape shape, Eigen::ArrayXd values, bool requires_grad) {
  if (static_cast<std::size_t>(values.size()) != element_count(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     to_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  node->id = next_id.fetch_add(1, std::memory_order_relaxed);
  return node;
}

}  // namespace detail

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

DiffArray DiffArray::constant(Shape shape, Eigen::ArrayXd values) {
  return DiffArray(detail::make_node(std::move(shape), std::move(values), false));
}

DiffArray DiffArray::parameter(Shape shape, Eigen::ArrayXd values) {
  return DiffArray(detail::make_node(std::move(shape), std::move(values), true));
}

DiffArray DiffArray::zeros(Shape shape, bool requires_grad) {
  const auto n = static_cast<Eigen::Index>(element_count(shape));
  return DiffArray(detail::make_node(std::move(shape), Eigen::ArrayXd::Zero(n), requires_grad));
}

DiffArray DiffArray::scalar(double value, bool requires_grad) {
  return DiffArray(detail::make_node({1}, Eigen::ArrayXd::Constant(1, value), requires_grad));
}

DiffArray DiffArray::from_op(Shape shape, Eigen::ArrayXd values, std::vector<DiffArray> parents,
                             BackwardFn backward) {
  bool any = false;
  for (const auto& p : parents) {
    if (!p.defined()) throw Error("operation received an undefined DiffArray");
    any = any || p.requires_grad();
  }
  auto node = detail::make_node(std::move(shape), std::move(values), any);
  if (any) {
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(std::move(p.node_));
    node->backward = std::move(backward);
  }
  return DiffArray(std::move(node));
}

const Shape& DiffArray::shape() const {
  if (!node_) throw Error("undefined DiffArray");
  return node_->shape;
}

std::size_t DiffArray::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) throw ShapeError("axis " + std::to_string(axis) + " out of range for " + to_string(s));
  return s[axis];
}

std::size_t DiffArray::size() const { return static_cast<std::size_t>(values().size()); }

const Eigen::ArrayXd& DiffArray::values() const {
  if (!node_) throw Error("undefined DiffArray");
  return node_->values;
}

double DiffArray::item() const {
  if (size() != 1) throw ShapeError("item() on array of shape " + to_string(shape()));
  return node_->values[0];
}

Eigen::ArrayXd& DiffArray::leaf_values() {
  if (!is_leaf()) throw Error("leaf_values() on a non-leaf DiffArray");
  return node_->values;
}

bool DiffArray::requires_grad() const { return node_ && node_->requires_grad; }

bool DiffArray::is_leaf() const { return node_ && node_->parents.empty() && !node_->backward; }

bool DiffArray::has_grad() const { return node_ && node_->grad.size() > 0; }

Eigen::ArrayXd DiffArray::grad() const {
  if (!node_) throw Error("undefined DiffArray");
  if (node_->grad.size() == 0) return Eigen::ArrayXd::Zero(node_->values.size());
  return node_->grad;
}

void DiffArray::zero_grad() {
  if (node_) node_->grad.resize(0);
}

std::uint64_t DiffArray::id() const { return node_ ? node_->id : 0; }

DiffArray DiffArray::detach() const { return constant(shape(), values()); }

void backward(const DiffArray& loss) {
  if (!loss.defined()) throw Error("backward on undefined DiffArray");
  if (loss.size() != 1) throw ShapeError("backward requires a scalar loss, got shape " + to_string(loss.shape()));
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents before children).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node_.get(), 0);
  visited.insert(loss.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  auto* root = loss.node_.get();
  if (root->grad.size() == 0) root->grad = Eigen::ArrayXd::Zero(1);
  root->grad[0] += 1.0;

  GradRefs refs;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (!node->backward || node->grad.size() == 0) continue;
    refs.assign(node->parents.size(), nullptr);
    for (std::size_t i = 0; i < node->parents.size(); ++i) {
      detail::Node* p = node->parents[i].get();
      if (!p->requires_grad) continue;
      if (p->grad.size() == 0) p->grad = Eigen::ArrayXd::Zero(p->values.size());
      refs[i] = &p->grad;
    }
    node->backward(node->grad, refs);
  }
}

void zero_grads(ParameterList& params) {
  for (auto& p : params) p.array.zero_grad();
}

}  // namespace ofdm::ng
