#pragma once

#include <memory>

#include "hf/dynamics/cstr.hpp"
#include "hf/envs/env.hpp"

namespace hf::envs {

// Benchmark configuration for the reactor control task: regulate c_B to a
// sampled goal under multiplicative rate uncertainty.
struct CstrSetup {
  // state box doubles as the constraint set X and the initial-state
  // sampling box
  BoxConstraint state_box{{0.1, 0.1, 50.0, 50.0}, {2.0, 2.0, 140.0, 140.0}};
  BoxConstraint action_box{{5.0, -8500.0}, {100.0, 0.0}};
  BoxConstraint goal_box{{0.1}, {2.0}};
  double sigma_sq = 1e-4;
  int episode_len = 50;
  dynamics::SimConfig sim{};

  double alpha_min = 0.95, alpha_max = 1.05;
  double beta_min = 0.9, beta_max = 1.1;
};

// n evenly spaced values covering [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, int n);

// Training uncertainty: the full grid_n x grid_n Cartesian grid of
// (alpha, beta) multipliers.
ScenarioSet cstr_training_scenarios(const CstrSetup& setup = {}, int grid_n = 10);

// Evaluation uncertainty: midpoints of consecutive training grid values,
// (grid_n-1)^2 pairs sharing no value with the training grid.
ScenarioSet cstr_evaluation_scenarios(const CstrSetup& setup = {}, int grid_n = 10);

// Planner subset: {min, nominal, max} for both multipliers (9 pairs).
ScenarioSet cstr_mpc_scenarios(const CstrSetup& setup = {});

ScenarioSet cstr_nominal_scenario();

// Goal space is the c_B component of the state.
GoalEnv make_cstr_env(const CstrSetup& setup, ScenarioSet scenarios);

}  // namespace hf::envs
