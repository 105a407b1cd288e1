#include "hf/num/mlp.hpp"

#include <cmath>

#include "hf/common/error.hpp"
#include "hf/common/rng.hpp"
#include "hf/kernels/kernels.hpp"

namespace hf::num {

OutputActivation output_activation_from_string(const std::string& s) {
  if (s == "identity") return OutputActivation::Identity;
  if (s == "tanh") return OutputActivation::Tanh;
  throw ConfigError("unknown output activation: " + s);
}

std::size_t MlpParams::param_count(const std::vector<int>& ls) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < ls.size(); ++i)
    n += static_cast<std::size_t>(ls[i + 1]) * ls[i] + ls[i + 1];
  return n;
}

std::size_t MlpParams::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int i = 0; i < layer; ++i)
    off += static_cast<std::size_t>(layer_sizes[i + 1]) * layer_sizes[i] + layer_sizes[i + 1];
  return off;
}

std::size_t MlpParams::bias_offset(int layer) const {
  return weight_offset(layer) + static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer];
}

std::span<double> MlpParams::weight(int layer) {
  return {flat.data() + weight_offset(layer),
          static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer]};
}
std::span<double> MlpParams::bias(int layer) {
  return {flat.data() + bias_offset(layer), static_cast<std::size_t>(layer_sizes[layer + 1])};
}
std::span<const double> MlpParams::weight(int layer) const {
  return {flat.data() + weight_offset(layer),
          static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer]};
}
std::span<const double> MlpParams::bias(int layer) const {
  return {flat.data() + bias_offset(layer), static_cast<std::size_t>(layer_sizes[layer + 1])};
}

MlpParams mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   OutputActivation output) {
  if (layer_sizes.size() < 2) throw ConfigError("mlp_init: need at least input and output layer");
  for (int w : layer_sizes)
    if (w < 1) throw ConfigError("mlp_init: zero-width layer");
  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.output = output;
  p.flat.assign(MlpParams::param_count(layer_sizes), 0.0);
  Rng rng(seed);
  for (int l = 0; l + 1 < static_cast<int>(layer_sizes.size()); ++l) {
    double bound = std::sqrt(6.0 / (layer_sizes[l] + layer_sizes[l + 1]));
    for (double& w : p.weight(l)) w = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return p;
}

Tensor mlp_forward(const MlpParams& p, std::span<const double> input) {
  if (static_cast<int>(input.size()) != p.in_dim())
    throw ShapeError("mlp_forward: input length does not match first layer width");
  const kernels::Table& k = kernels::active();
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (int l = 0; l < p.num_layers(); ++l) {
    int out = p.layer_sizes[l + 1];
    next.assign(out, 0.0);
    k.matvec(out, p.layer_sizes[l], p.weight(l).data(), cur.data(), next.data());
    k.axpy(out, 1.0, p.bias(l).data(), next.data());
    bool last = l + 1 == p.num_layers();
    if (!last || p.output == OutputActivation::Tanh) kernels::vtanh(out, next.data(), next.data());
    cur.swap(next);
  }
  return Tensor::vec(std::move(cur));
}

BatchMlpEval::BatchMlpEval(const MlpParams* p, int max_batch) : p_(p), max_batch_(max_batch) {
  buf_.resize(p->num_layers());
  for (int l = 0; l < p->num_layers(); ++l)
    buf_[l].assign(static_cast<std::size_t>(max_batch) * p->layer_sizes[l + 1], 0.0);
}

std::span<const double> BatchMlpEval::run(const double* x, int batch) {
  if (batch > max_batch_) throw ShapeError("BatchMlpEval: batch exceeds capacity");
  const kernels::Table& k = kernels::active();
  const double* cur = x;
  int cur_w = p_->layer_sizes[0];
  for (int l = 0; l < p_->num_layers(); ++l) {
    int out = p_->layer_sizes[l + 1];
    double* dst = buf_[l].data();
    const double* w = p_->weight(l).data();
    const double* b = p_->bias(l).data();
    for (int r = 0; r < batch; ++r) {
      double* row = dst + static_cast<std::size_t>(r) * out;
      k.matvec(out, cur_w, w, cur + static_cast<std::size_t>(r) * cur_w, row);
      k.axpy(out, 1.0, b, row);
    }
    bool last = l + 1 == p_->num_layers();
    if (!last || p_->output == OutputActivation::Tanh)
      kernels::vtanh(batch * out, dst, dst);
    cur = dst;
    cur_w = out;
  }
  return {cur, static_cast<std::size_t>(batch) * p_->out_dim()};
}

namespace {
MlpOnTape attach_impl(Tape& t, const MlpParams& p, bool trainable) {
  MlpOnTape net;
  net.output = p.output;
  for (int l = 0; l < p.num_layers(); ++l) {
    int out = p.layer_sizes[l + 1];
    int in = p.layer_sizes[l];
    const double* w = p.flat.data() + p.weight_offset(l);
    const double* b = p.flat.data() + p.bias_offset(l);
    if (trainable) {
      net.w.push_back(t.leaf_view(const_cast<double*>(w), out, in, true));
      net.b.push_back(t.leaf_view(const_cast<double*>(b), 1, out, true));
    } else {
      net.w.push_back(t.leaf_view(w, out, in));
      net.b.push_back(t.leaf_view(b, 1, out));
    }
  }
  return net;
}
}  // namespace

MlpOnTape attach_mlp(Tape& t, MlpParams& p, bool trainable) { return attach_impl(t, p, trainable); }
MlpOnTape attach_mlp(Tape& t, const MlpParams& p) { return attach_impl(t, p, false); }

NodeId mlp_apply(Tape& t, const MlpOnTape& net, NodeId input) {
  NodeId cur = input;
  int n = static_cast<int>(net.w.size());
  for (int l = 0; l < n; ++l) {
    cur = t.linear(net.w[l], cur, net.b[l]);
    bool last = l + 1 == n;
    if (!last || net.output == OutputActivation::Tanh) cur = t.tanh(cur);
  }
  return cur;
}

}  // namespace hf::num
