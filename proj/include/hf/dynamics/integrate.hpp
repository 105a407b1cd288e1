#pragma once

#include <span>
#include <vector>

#include "hf/common/error.hpp"
#include "hf/dynamics/scenario.hpp"
#include "hf/num/tape.hpp"
#include "hf/num/tensor.hpp"

namespace hf::dynamics {

// Classical RK4 with zero-order-hold input, applied sim.substeps times.
// Deriv signature: void(span<const double> x, span<const double> u,
//                       const ScenarioParam&, span<double> dxdt)
template <class Deriv>
void rk4_step(Deriv&& f, std::span<const double> x, std::span<const double> u,
              const ScenarioParam& psi, const SimConfig& sim, std::span<double> out) {
  if (sim.dt <= 0.0) throw ConfigError("rk4_step: dt must be positive");
  if (sim.substeps < 1) throw ConfigError("rk4_step: substeps must be >= 1");
  std::size_t n = x.size();
  double h = sim.dt / sim.substeps;
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < sim.substeps; ++s) {
    f(cur, u, psi, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = cur[i] + 0.5 * h * k1[i];
    f(tmp, u, psi, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = cur[i] + 0.5 * h * k2[i];
    f(tmp, u, psi, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = cur[i] + h * k3[i];
    f(tmp, u, psi, k4);
    for (std::size_t i = 0; i < n; ++i)
      cur[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!num::all_finite(cur)) throw IntegrationError("rk4_step: non-finite state");
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = cur[i];
}

// Graph-side RK4. DerivNode signature:
//   NodeId(Tape&, NodeId x, NodeId u, const ScenarioParam&)
template <class DerivNode>
num::NodeId rk4_step_node(num::Tape& t, DerivNode&& f, num::NodeId x, num::NodeId u,
                          const ScenarioParam& psi, const SimConfig& sim) {
  if (sim.dt <= 0.0) throw ConfigError("rk4_step_node: dt must be positive");
  if (sim.substeps < 1) throw ConfigError("rk4_step_node: substeps must be >= 1");
  double h = sim.dt / sim.substeps;
  num::NodeId cur = x;
  for (int s = 0; s < sim.substeps; ++s) {
    num::NodeId k1 = f(t, cur, u, psi);
    num::NodeId k2 = f(t, t.add(cur, t.affine(k1, 0.5 * h, 0.0)), u, psi);
    num::NodeId k3 = f(t, t.add(cur, t.affine(k2, 0.5 * h, 0.0)), u, psi);
    num::NodeId k4 = f(t, t.add(cur, t.affine(k3, h, 0.0)), u, psi);
    num::NodeId incr = t.add(t.add(k1, k4), t.affine(t.add(k2, k3), 2.0, 0.0));
    cur = t.add(cur, t.affine(incr, h / 6.0, 0.0));
  }
  return cur;
}

}  // namespace hf::dynamics
