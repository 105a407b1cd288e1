#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hf/num/tensor.hpp"

namespace hf::num {

using NodeId = std::int32_t;

// Reverse-mode tape over a fixed op vocabulary. Build the graph once, then
// re-evaluate cheaply: write new values into leaves with set_leaf(), call
// forward(), and backward(root) for gradients. Leaves may view external
// storage (leaf_view) so parameter updates are visible without copying.
class Tape {
 public:
  // owned leaf, zero-initialized
  NodeId leaf(int rows, int cols, bool requires_grad = true);
  // leaf viewing external mutable storage (lifetime managed by caller)
  NodeId leaf_view(double* data, int rows, int cols, bool requires_grad);
  // leaf viewing external const storage; never differentiated, never written
  NodeId leaf_view(const double* data, int rows, int cols);
  NodeId constant(std::span<const double> v, int rows, int cols);
  NodeId constant_scalar(double v);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  // a*x + b, elementwise with scalar a, b
  NodeId affine(NodeId x, double a, double b);
  NodeId reciprocal(NodeId x);
  NodeId exp(NodeId x);
  NodeId tanh(NodeId x);
  NodeId square(NodeId x);
  NodeId relu(NodeId x);
  NodeId sum(NodeId x);
  NodeId mean(NodeId x);
  // along columns; rows must match
  NodeId concat(NodeId a, NodeId b);
  NodeId slice(NodeId x, int col0, int len);
  // y = x W^T + b with W (out x in) and x (r x in); bias (1 x out) optional (-1)
  NodeId linear(NodeId w, NodeId x, NodeId b);

  void set_leaf(NodeId id, std::span<const double> v);
  std::span<double> leaf_data(NodeId id);

  void forward();
  void backward(NodeId root);  // root must be scalar (1 x 1)

  std::span<const double> value(NodeId id) const;
  double scalar(NodeId id) const;
  std::span<const double> grad(NodeId id) const;

  int rows(NodeId id) const { return nodes_[id].rows; }
  int cols(NodeId id) const { return nodes_[id].cols; }
  bool requires_grad(NodeId id) const { return nodes_[id].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }
  bool value_finite(NodeId id) const;

 private:
  enum class Op : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Affine,
    Recip,
    Exp,
    Tanh,
    Square,
    Relu,
    Sum,
    Concat,
    Slice,
    Linear,
  };

  struct Node {
    Op op;
    bool needs_grad = false;
    bool ext_const = false;
    NodeId a = -1, b = -1, c = -1;
    int rows = 0, cols = 0;
    double p0 = 0.0, p1 = 0.0;
    int i0 = 0;
    std::int64_t val_off = -1;  // into vals_, or -1 when ext != nullptr
    std::int64_t grad_off = -1;
    double* ext = nullptr;
  };

  NodeId push(Node n);
  NodeId unary(Op op, NodeId x);
  NodeId binary(Op op, NodeId a, NodeId b);
  const double* vptr(const Node& n) const {
    return n.ext ? n.ext : vals_.data() + n.val_off;
  }
  double* vptr(Node& n) { return n.ext ? n.ext : vals_.data() + n.val_off; }
  double* gptr(Node& n) { return grads_.data() + n.grad_off; }
  void check_id(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<double> vals_;
  std::vector<double> grads_;
};

// Convenience for tests and small one-off gradients: builds a fresh graph via
// `build` (which receives the tape and leaf ids for `at`), evaluates, and
// returns the value plus d(root)/d(at).
template <class Build>
std::pair<double, std::vector<double>> value_and_grad(std::span<const double> at, Build&& build) {
  Tape t;
  NodeId x = t.leaf(1, static_cast<int>(at.size()), true);
  t.set_leaf(x, at);
  NodeId root = build(t, x);
  t.forward();
  t.backward(root);
  auto g = t.grad(x);
  return {t.scalar(root), std::vector<double>(g.begin(), g.end())};
}

}  // namespace hf::num
