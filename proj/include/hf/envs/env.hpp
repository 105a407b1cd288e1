#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hf/common/rng.hpp"
#include "hf/dynamics/model.hpp"

namespace hf::envs {

struct BoxConstraint {
  std::vector<double> lower, upper;

  BoxConstraint() = default;
  BoxConstraint(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  void clamp(std::span<double> x) const;
  // closest point of the box (elementwise clamp)
  void prox(std::span<const double> x, std::span<double> out) const;
  double center(std::size_t i) const { return 0.5 * (lower[i] + upper[i]); }
  double halfwidth(std::size_t i) const { return 0.5 * (upper[i] - lower[i]); }
};

struct ScenarioSet {
  std::vector<dynamics::ScenarioParam> params;

  std::size_t size() const { return params.size(); }
  const dynamics::ScenarioParam& operator[](std::size_t i) const { return params[i]; }
};

struct GoalObservation {
  std::vector<double> state;
  std::vector<double> achieved_goal;
  std::vector<double> desired_goal;
  int step = 0;
};

double sparse_reward(std::span<const double> achieved, std::span<const double> desired,
                     double threshold);
double gaussian_reward(std::span<const double> achieved, std::span<const double> desired,
                       double sigma_sq);

// Projection of the model state into goal space.
using GoalMap = std::function<void(std::span<const double> state, std::span<double> goal)>;

// Goal-conditioned episodic environment over a dynamics model with scenario
// uncertainty. Each step draws a scenario uniformly; reward is the Gaussian
// goal reward evaluated at the next achieved goal.
class GoalEnv {
 public:
  GoalEnv(std::shared_ptr<const dynamics::DynamicsModel> model, ScenarioSet scenarios,
          GoalMap goal_map, int goal_dim, double sigma_sq, BoxConstraint init_box,
          BoxConstraint goal_box, BoxConstraint action_box, int episode_len);

  int state_dim() const { return model_->state_dim(); }
  int action_dim() const { return model_->action_dim(); }
  int goal_dim() const { return goal_dim_; }
  int episode_len() const { return episode_len_; }
  double sigma_sq() const { return sigma_sq_; }
  const ScenarioSet& scenarios() const { return scenarios_; }
  const BoxConstraint& init_box() const { return init_box_; }
  const BoxConstraint& goal_box() const { return goal_box_; }
  const BoxConstraint& action_box() const { return action_box_; }
  const dynamics::DynamicsModel& model() const { return *model_; }

  void map_goal(std::span<const double> state, std::span<double> goal) const {
    goal_map_(state, goal);
  }

  GoalObservation reset(Rng& rng) const;
  // Observation with an explicit state and goal (for scripted evaluations).
  GoalObservation observe(std::vector<double> state, std::vector<double> goal) const;

  struct StepResult {
    GoalObservation obs;
    double reward = 0.0;
    bool done = false;
    bool failed = false;  // non-finite state reached
    int scenario_index = 0;
  };

  StepResult step(const GoalObservation& obs, std::span<const double> action, Rng& rng) const;

  // One next state per scenario, in scenario-set order.
  std::vector<std::vector<double>> branch_all(std::span<const double> state,
                                              std::span<const double> action) const;

  double reward(std::span<const double> achieved, std::span<const double> desired) const {
    return gaussian_reward(achieved, desired, sigma_sq_);
  }

 private:
  std::shared_ptr<const dynamics::DynamicsModel> model_;
  ScenarioSet scenarios_;
  GoalMap goal_map_;
  int goal_dim_;
  double sigma_sq_;
  BoxConstraint init_box_;
  BoxConstraint goal_box_;
  BoxConstraint action_box_;
  int episode_len_;
};

}  // namespace hf::envs
