#pragma once

#include <span>

#include "hf/dynamics/scenario.hpp"
#include "hf/num/tape.hpp"

namespace hf::dynamics {

// One-sample discrete transition x' = f(x, u, psi), available both as a plain
// evaluation and as a tape subgraph (for objectives differentiated through
// the dynamics).
struct DynamicsModel {
  virtual ~DynamicsModel() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual void step(std::span<const double> x, std::span<const double> u, const ScenarioParam& psi,
                    std::span<double> out) const = 0;
  virtual num::NodeId step_node(num::Tape& t, num::NodeId x, num::NodeId u,
                                const ScenarioParam& psi) const = 0;
  virtual void validate_scenario(const ScenarioParam&) const {}
};

}  // namespace hf::dynamics
