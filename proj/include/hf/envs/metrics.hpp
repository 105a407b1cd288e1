#pragma once

#include <string>
#include <vector>

#include "hf/envs/env.hpp"

namespace hf::envs {

struct TrajectoryPoint {
  int step = 0;
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  int scenario_index = 0;
};

using Trajectory = std::vector<TrajectoryPoint>;

// Sum over steps of the Gaussian goal reward at the achieved goals.
double time_near_goal(const std::vector<std::vector<double>>& achieved,
                      std::span<const double> goal, double sigma_sq = 0.01);

// Sum over steps of exp(-||s - prox(s)||^2 / (2 sigma^2)) - 1; zero inside
// the box, approaching -1 per step far outside. Always <= 0.
double time_outside_constraints(const std::vector<std::vector<double>>& states,
                                const BoxConstraint& box, double sigma_sq = 0.01);

// One row per step: step, <state columns>, <action columns>, reward,
// scenario_index.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& state_names,
                          const std::vector<std::string>& action_names);

}  // namespace hf::envs
