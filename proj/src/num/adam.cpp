#include "hf/num/adam.hpp"

#include <cmath>

#include "hf/common/error.hpp"
#include "hf/kernels/kernels.hpp"

namespace hf::num {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw ShapeError("adam_step: size mismatch");
  bool all_zero = true;
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient");
    if (g != 0.0) all_zero = false;
  }
  state.t += 1;
  double c1 = 1.0 / (1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
  double c2 = 1.0 / (1.0 - std::pow(state.beta2, static_cast<double>(state.t)));
  const kernels::Table& k = kernels::active();
  if (all_zero) {
    // accumulators decay; parameters must stay put
    k.scale_add(static_cast<int>(n), state.beta1, 0.0, state.m.data(), state.m.data());
    k.scale_add(static_cast<int>(n), state.beta2, 0.0, state.v.data(), state.v.data());
    return;
  }
  k.adam(static_cast<int>(n), params.data(), grads.data(), state.m.data(), state.v.data(),
         state.lr, state.beta1, state.beta2, state.eps, c1, c2);
}

}  // namespace hf::num
