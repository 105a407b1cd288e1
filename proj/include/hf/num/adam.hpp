#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hf::num {

struct AdamState {
  std::vector<double> m, v;
  std::int64_t t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n, double lr_ = 1e-3, double b1 = 0.9, double b2 = 0.999,
                     double eps_ = 1e-8)
      : m(n, 0.0), v(n, 0.0), lr(lr_), beta1(b1), beta2(b2), eps(eps_) {}
};

// In-place Adam update with bias correction. Throws NumericalError on
// non-finite gradients. An exactly-zero gradient leaves the parameters
// unchanged (accumulators still decay and the step counter advances), so a
// zero-gradient step is the identity on parameters regardless of state.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace hf::num
