#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hf/num/tape.hpp"
#include "hf/num/tensor.hpp"

namespace hf::num {

enum class OutputActivation { Identity, Tanh };

inline std::string to_string(OutputActivation a) {
  return a == OutputActivation::Tanh ? "tanh" : "identity";
}
OutputActivation output_activation_from_string(const std::string& s);

// Fully-connected net, tanh hidden activations. All parameters live in one
// flat buffer (per layer: weights row-major, then biases) so optimizer steps,
// Polyak mixes and checkpoints operate on a single span.
struct MlpParams {
  std::vector<int> layer_sizes;
  OutputActivation output = OutputActivation::Identity;
  std::vector<double> flat;

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int in_dim() const { return layer_sizes.front(); }
  int out_dim() const { return layer_sizes.back(); }

  std::size_t weight_offset(int layer) const;
  std::size_t bias_offset(int layer) const;
  std::span<double> weight(int layer);
  std::span<double> bias(int layer);
  std::span<const double> weight(int layer) const;
  std::span<const double> bias(int layer) const;

  static std::size_t param_count(const std::vector<int>& layer_sizes);
};

MlpParams mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   OutputActivation output = OutputActivation::Identity);

// Pure single-sample evaluation.
Tensor mlp_forward(const MlpParams& p, std::span<const double> input);

// Reusable batch evaluator (no allocations per call after construction).
class BatchMlpEval {
 public:
  BatchMlpEval() = default;
  BatchMlpEval(const MlpParams* p, int max_batch);
  // X: batch x in_dim row-major; returns batch x out_dim view valid until next run
  std::span<const double> run(const double* x, int batch);

 private:
  const MlpParams* p_ = nullptr;
  int max_batch_ = 0;
  std::vector<std::vector<double>> buf_;
};

// Graph-side network application. Parameters enter as leaf views onto
// MlpParams.flat: trainable attachments get gradients, const attachments are
// read-only (updates to the flat buffer are still visible on later forwards).
struct MlpOnTape {
  std::vector<NodeId> w, b;
  OutputActivation output = OutputActivation::Identity;
};

MlpOnTape attach_mlp(Tape& t, MlpParams& p, bool trainable);
MlpOnTape attach_mlp(Tape& t, const MlpParams& p);
NodeId mlp_apply(Tape& t, const MlpOnTape& net, NodeId input);

}  // namespace hf::num
