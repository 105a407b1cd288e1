#include "hf/num/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hf/kernels/kernels.hpp"

namespace hf::num {

namespace {
const kernels::Table& K() { return kernels::active(); }
}

void Tape::check_id(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) throw Error("invalid node id");
}

NodeId Tape::push(Node n) {
  int sz = n.rows * n.cols;
  if (sz <= 0) throw ShapeError("empty tensor in tape op");
  if (!n.ext) {
    n.val_off = static_cast<std::int64_t>(vals_.size());
    vals_.resize(vals_.size() + sz, 0.0);
  }
  if (n.needs_grad) {
    n.grad_off = static_cast<std::int64_t>(grads_.size());
    grads_.resize(grads_.size() + sz, 0.0);
  }
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(int rows, int cols, bool requires_grad) {
  Node n;
  n.op = Op::Leaf;
  n.rows = rows;
  n.cols = cols;
  n.needs_grad = requires_grad;
  return push(n);
}

NodeId Tape::leaf_view(double* data, int rows, int cols, bool requires_grad) {
  Node n;
  n.op = Op::Leaf;
  n.rows = rows;
  n.cols = cols;
  n.needs_grad = requires_grad;
  n.ext = data;
  return push(n);
}

NodeId Tape::leaf_view(const double* data, int rows, int cols) {
  Node n;
  n.op = Op::Leaf;
  n.rows = rows;
  n.cols = cols;
  n.needs_grad = false;
  n.ext = const_cast<double*>(data);  // read-only by contract (ext_const)
  n.ext_const = true;
  return push(n);
}

NodeId Tape::constant(std::span<const double> v, int rows, int cols) {
  if (static_cast<int>(v.size()) != rows * cols) throw ShapeError("constant size mismatch");
  NodeId id = leaf(rows, cols, false);
  std::memcpy(vptr(nodes_[id]), v.data(), v.size() * sizeof(double));
  return id;
}

NodeId Tape::constant_scalar(double v) { return constant(std::span<const double>(&v, 1), 1, 1); }

NodeId Tape::unary(Op op, NodeId x) {
  check_id(x);
  Node n;
  n.op = op;
  n.a = x;
  n.rows = nodes_[x].rows;
  n.cols = nodes_[x].cols;
  n.needs_grad = nodes_[x].needs_grad;
  return push(n);
}

NodeId Tape::binary(Op op, NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  if (nodes_[a].rows != nodes_[b].rows || nodes_[a].cols != nodes_[b].cols)
    throw ShapeError("elementwise op on mismatched shapes");
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.rows = nodes_[a].rows;
  n.cols = nodes_[a].cols;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(n);
}

NodeId Tape::add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
NodeId Tape::sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
NodeId Tape::mul(NodeId a, NodeId b) { return binary(Op::Mul, a, b); }

NodeId Tape::affine(NodeId x, double a, double b) {
  NodeId id = unary(Op::Affine, x);
  nodes_[id].p0 = a;
  nodes_[id].p1 = b;
  return id;
}

NodeId Tape::reciprocal(NodeId x) { return unary(Op::Recip, x); }
NodeId Tape::exp(NodeId x) { return unary(Op::Exp, x); }
NodeId Tape::tanh(NodeId x) { return unary(Op::Tanh, x); }
NodeId Tape::square(NodeId x) { return unary(Op::Square, x); }
NodeId Tape::relu(NodeId x) { return unary(Op::Relu, x); }

NodeId Tape::sum(NodeId x) {
  check_id(x);
  Node n;
  n.op = Op::Sum;
  n.a = x;
  n.rows = 1;
  n.cols = 1;
  n.needs_grad = nodes_[x].needs_grad;
  return push(n);
}

NodeId Tape::mean(NodeId x) {
  check_id(x);
  int sz = nodes_[x].rows * nodes_[x].cols;
  return affine(sum(x), 1.0 / sz, 0.0);
}

NodeId Tape::concat(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  if (nodes_[a].rows != nodes_[b].rows) throw ShapeError("concat row mismatch");
  Node n;
  n.op = Op::Concat;
  n.a = a;
  n.b = b;
  n.rows = nodes_[a].rows;
  n.cols = nodes_[a].cols + nodes_[b].cols;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(n);
}

NodeId Tape::slice(NodeId x, int col0, int len) {
  check_id(x);
  if (col0 < 0 || len <= 0 || col0 + len > nodes_[x].cols) throw ShapeError("slice out of range");
  Node n;
  n.op = Op::Slice;
  n.a = x;
  n.rows = nodes_[x].rows;
  n.cols = len;
  n.i0 = col0;
  n.needs_grad = nodes_[x].needs_grad;
  return push(n);
}

NodeId Tape::linear(NodeId w, NodeId x, NodeId b) {
  check_id(w);
  check_id(x);
  const Node& wn = nodes_[w];
  const Node& xn = nodes_[x];
  if (xn.cols != wn.cols) throw ShapeError("linear: input width does not match weight columns");
  bool ng = wn.needs_grad || xn.needs_grad;
  if (b >= 0) {
    check_id(b);
    if (nodes_[b].rows != 1 || nodes_[b].cols != wn.rows)
      throw ShapeError("linear: bias shape must be 1 x out");
    ng = ng || nodes_[b].needs_grad;
  }
  Node n;
  n.op = Op::Linear;
  n.a = w;
  n.b = x;
  n.c = b;
  n.rows = xn.rows;
  n.cols = wn.rows;
  n.needs_grad = ng;
  return push(n);
}

void Tape::set_leaf(NodeId id, std::span<const double> v) {
  check_id(id);
  Node& n = nodes_[id];
  if (n.op != Op::Leaf) throw Error("set_leaf on non-leaf node");
  if (n.ext_const) throw Error("set_leaf on const view");
  if (static_cast<int>(v.size()) != n.rows * n.cols) throw ShapeError("set_leaf size mismatch");
  std::memcpy(vptr(n), v.data(), v.size() * sizeof(double));
}

std::span<double> Tape::leaf_data(NodeId id) {
  check_id(id);
  Node& n = nodes_[id];
  if (n.op != Op::Leaf) throw Error("leaf_data on non-leaf node");
  if (n.ext_const) throw Error("leaf_data on const view");
  return {vptr(n), static_cast<std::size_t>(n.rows * n.cols)};
}

std::span<const double> Tape::value(NodeId id) const {
  check_id(id);
  const Node& n = nodes_[id];
  return {vptr(n), static_cast<std::size_t>(n.rows * n.cols)};
}

double Tape::scalar(NodeId id) const {
  check_id(id);
  const Node& n = nodes_[id];
  if (n.rows * n.cols != 1) throw ShapeError("scalar() on non-scalar node");
  return *vptr(n);
}

std::span<const double> Tape::grad(NodeId id) const {
  check_id(id);
  const Node& n = nodes_[id];
  if (!n.needs_grad) throw Error("grad() on node without gradient");
  return {grads_.data() + n.grad_off, static_cast<std::size_t>(n.rows * n.cols)};
}

bool Tape::value_finite(NodeId id) const {
  auto v = value(id);
  return all_finite(v);
}

void Tape::forward() {
  const kernels::Table& k = K();
  for (Node& n : nodes_) {
    int sz = n.rows * n.cols;
    double* out = vptr(n);
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add:
        k.vadd(sz, vptr(nodes_[n.a]), vptr(nodes_[n.b]), out);
        break;
      case Op::Sub:
        k.vsub(sz, vptr(nodes_[n.a]), vptr(nodes_[n.b]), out);
        break;
      case Op::Mul:
        k.vmul(sz, vptr(nodes_[n.a]), vptr(nodes_[n.b]), out);
        break;
      case Op::Affine:
        k.scale_add(sz, n.p0, n.p1, vptr(nodes_[n.a]), out);
        break;
      case Op::Recip: {
        const double* x = vptr(nodes_[n.a]);
        for (int i = 0; i < sz; ++i) out[i] = 1.0 / x[i];
        break;
      }
      case Op::Exp:
        kernels::vexp(sz, vptr(nodes_[n.a]), out);
        break;
      case Op::Tanh:
        kernels::vtanh(sz, vptr(nodes_[n.a]), out);
        break;
      case Op::Square: {
        const double* x = vptr(nodes_[n.a]);
        k.vmul(sz, x, x, out);
        break;
      }
      case Op::Relu:
        k.vrelu(sz, vptr(nodes_[n.a]), out);
        break;
      case Op::Sum:
        out[0] = k.vsum(nodes_[n.a].rows * nodes_[n.a].cols, vptr(nodes_[n.a]));
        break;
      case Op::Concat: {
        const Node& a = nodes_[n.a];
        const Node& b = nodes_[n.b];
        const double* pa = vptr(nodes_[n.a]);
        const double* pb = vptr(nodes_[n.b]);
        for (int r = 0; r < n.rows; ++r) {
          std::memcpy(out + static_cast<std::size_t>(r) * n.cols, pa + static_cast<std::size_t>(r) * a.cols,
                      a.cols * sizeof(double));
          std::memcpy(out + static_cast<std::size_t>(r) * n.cols + a.cols,
                      pb + static_cast<std::size_t>(r) * b.cols, b.cols * sizeof(double));
        }
        break;
      }
      case Op::Slice: {
        const Node& a = nodes_[n.a];
        const double* pa = vptr(nodes_[n.a]);
        for (int r = 0; r < n.rows; ++r)
          std::memcpy(out + static_cast<std::size_t>(r) * n.cols,
                      pa + static_cast<std::size_t>(r) * a.cols + n.i0, n.cols * sizeof(double));
        break;
      }
      case Op::Linear: {
        const Node& wn = nodes_[n.a];
        const Node& xn = nodes_[n.b];
        const double* w = vptr(nodes_[n.a]);
        const double* x = vptr(nodes_[n.b]);
        int out_dim = wn.rows, in_dim = wn.cols;
        for (int r = 0; r < n.rows; ++r) {
          double* yr = out + static_cast<std::size_t>(r) * out_dim;
          k.matvec(out_dim, in_dim, w, x + static_cast<std::size_t>(r) * xn.cols, yr);
          if (n.c >= 0) k.axpy(out_dim, 1.0, vptr(nodes_[n.c]), yr);
        }
        break;
      }
    }
  }
}

void Tape::backward(NodeId root) {
  check_id(root);
  Node& rn = nodes_[root];
  if (rn.rows * rn.cols != 1) throw ShapeError("backward root must be scalar");
  std::fill(grads_.begin(), grads_.end(), 0.0);
  if (!rn.needs_grad) return;  // constant root: every gradient is zero
  grads_[rn.grad_off] = 1.0;

  const kernels::Table& k = K();
  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.op == Op::Leaf) continue;
    const double* dy = gptr(n);
    int sz = n.rows * n.cols;
    Node& an = nodes_[n.a];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add: {
        if (an.needs_grad) k.axpy(sz, 1.0, dy, gptr(an));
        Node& bn = nodes_[n.b];
        if (bn.needs_grad) k.axpy(sz, 1.0, dy, gptr(bn));
        break;
      }
      case Op::Sub: {
        if (an.needs_grad) k.axpy(sz, 1.0, dy, gptr(an));
        Node& bn = nodes_[n.b];
        if (bn.needs_grad) k.axpy(sz, -1.0, dy, gptr(bn));
        break;
      }
      case Op::Mul: {
        Node& bn = nodes_[n.b];
        if (an.needs_grad) k.vfma3(sz, 1.0, dy, vptr(bn), gptr(an));
        if (bn.needs_grad) k.vfma3(sz, 1.0, dy, vptr(an), gptr(bn));
        break;
      }
      case Op::Affine:
        if (an.needs_grad) k.axpy(sz, n.p0, dy, gptr(an));
        break;
      case Op::Recip:
        if (an.needs_grad) {
          const double* y = vptr(n);
          double* da = gptr(an);
          for (int i = 0; i < sz; ++i) da[i] -= y[i] * y[i] * dy[i];
        }
        break;
      case Op::Exp:
        if (an.needs_grad) k.vfma3(sz, 1.0, vptr(n), dy, gptr(an));
        break;
      case Op::Tanh:
        if (an.needs_grad) k.vtanh_bwd(sz, vptr(n), dy, gptr(an));
        break;
      case Op::Square:
        if (an.needs_grad) k.vfma3(sz, 2.0, vptr(an), dy, gptr(an));
        break;
      case Op::Relu:
        if (an.needs_grad) k.vrelu_bwd(sz, vptr(an), dy, gptr(an));
        break;
      case Op::Sum:
        if (an.needs_grad) k.vadd_scalar(an.rows * an.cols, dy[0], gptr(an));
        break;
      case Op::Concat: {
        Node& bn = nodes_[n.b];
        for (int r = 0; r < n.rows; ++r) {
          const double* dyr = dy + static_cast<std::size_t>(r) * n.cols;
          if (an.needs_grad)
            k.axpy(an.cols, 1.0, dyr, gptr(an) + static_cast<std::size_t>(r) * an.cols);
          if (bn.needs_grad)
            k.axpy(bn.cols, 1.0, dyr + an.cols, gptr(bn) + static_cast<std::size_t>(r) * bn.cols);
        }
        break;
      }
      case Op::Slice:
        if (an.needs_grad)
          for (int r = 0; r < n.rows; ++r)
            k.axpy(n.cols, 1.0, dy + static_cast<std::size_t>(r) * n.cols,
                   gptr(an) + static_cast<std::size_t>(r) * an.cols + n.i0);
        break;
      case Op::Linear: {
        Node& wn = nodes_[n.a];
        Node& xn = nodes_[n.b];
        int out_dim = wn.rows, in_dim = wn.cols;
        const double* w = vptr(wn);
        const double* x = vptr(xn);
        for (int r = 0; r < n.rows; ++r) {
          const double* dyr = dy + static_cast<std::size_t>(r) * out_dim;
          if (xn.needs_grad)
            k.matvec_t_acc(out_dim, in_dim, w, dyr,
                           gptr(xn) + static_cast<std::size_t>(r) * in_dim);
          if (wn.needs_grad)
            k.ger_acc(out_dim, in_dim, dyr, x + static_cast<std::size_t>(r) * in_dim, gptr(wn));
          if (n.c >= 0 && nodes_[n.c].needs_grad) k.axpy(out_dim, 1.0, dyr, gptr(nodes_[n.c]));
        }
        break;
      }
    }
  }
}

}  // namespace hf::num
