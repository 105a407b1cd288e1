#pragma once

#include <span>
#include <vector>

#include "hf/dynamics/model.hpp"
#include "hf/num/tensor.hpp"

namespace hf::dynamics {

// x' = A x + B u
struct LinearSystem {
  num::Tensor a;  // n x n
  num::Tensor b;  // n x m
};

void linear_step(const LinearSystem& sys, std::span<const double> x,
                 std::span<const double> u, std::span<double> out);

// Benchmark wrapper around linear_step. The scenario's `shift` adds
// shift * disturbance to every step, giving a cheap family of mirrored
// uncertainty realizations; nominal scenarios (shift = 0) reduce to the
// exact affine map.
class LinearModel final : public DynamicsModel {
 public:
  explicit LinearModel(LinearSystem sys);
  LinearModel(LinearSystem sys, std::vector<double> disturbance);

  int state_dim() const override { return static_cast<int>(sys_.a.rows); }
  int action_dim() const override { return static_cast<int>(sys_.b.cols); }
  const LinearSystem& system() const { return sys_; }

  void step(std::span<const double> x, std::span<const double> u,
            const ScenarioParam& psi, std::span<double> out) const override;

  num::NodeId step_node(num::Tape& t, num::NodeId x, num::NodeId u,
                        const ScenarioParam& psi) const override;

 private:
  LinearSystem sys_;
  std::vector<double> disturbance_;  // direction scaled by psi.shift
};

// x' = x + dt*u on one state; the smallest system with a meaningful
// disturbance direction.
LinearModel scalar_integrator(double dt = 1.0);

// Position/velocity double integrator with sample time dt.
LinearSystem double_integrator(double dt = 0.1);

}  // namespace hf::dynamics
