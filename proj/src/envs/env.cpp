#include "hf/envs/env.hpp"

#include <algorithm>
#include <cmath>

#include "hf/common/error.hpp"

namespace hf::envs {

BoxConstraint::BoxConstraint(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw ShapeError("BoxConstraint: bound lengths differ");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw ConfigError("BoxConstraint: lower bound exceeds upper bound");
}

bool BoxConstraint::contains(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("BoxConstraint::contains: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

void BoxConstraint::clamp(std::span<double> x) const {
  if (x.size() != dim()) throw ShapeError("BoxConstraint::clamp: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

void BoxConstraint::prox(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim() || out.size() != dim())
    throw ShapeError("BoxConstraint::prox: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], lower[i], upper[i]);
}

double sparse_reward(std::span<const double> achieved, std::span<const double> desired,
                     double threshold) {
  if (achieved.size() != desired.size())
    throw ShapeError("sparse_reward: goal dimensions differ");
  if (!(threshold > 0.0)) throw ConfigError("sparse_reward: threshold must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < achieved.size(); ++i) {
    double d = achieved[i] - desired[i];
    d2 += d * d;
  }
  return d2 <= threshold * threshold ? 1.0 : 0.0;
}

double gaussian_reward(std::span<const double> achieved, std::span<const double> desired,
                       double sigma_sq) {
  if (achieved.size() != desired.size())
    throw ShapeError("gaussian_reward: goal dimensions differ");
  if (!(sigma_sq > 0.0)) throw ConfigError("gaussian_reward: variance must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < achieved.size(); ++i) {
    double d = desired[i] - achieved[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * sigma_sq));
}

GoalEnv::GoalEnv(std::shared_ptr<const dynamics::DynamicsModel> model, ScenarioSet scenarios,
                 GoalMap goal_map, int goal_dim, double sigma_sq, BoxConstraint init_box,
                 BoxConstraint goal_box, BoxConstraint action_box, int episode_len)
    : model_(std::move(model)),
      scenarios_(std::move(scenarios)),
      goal_map_(std::move(goal_map)),
      goal_dim_(goal_dim),
      sigma_sq_(sigma_sq),
      init_box_(std::move(init_box)),
      goal_box_(std::move(goal_box)),
      action_box_(std::move(action_box)),
      episode_len_(episode_len) {
  if (!model_) throw ConfigError("GoalEnv: missing dynamics model");
  if (scenarios_.size() == 0) throw ConfigError("GoalEnv: empty scenario set");
  if (!(sigma_sq_ > 0.0)) throw ConfigError("GoalEnv: reward variance must be positive");
  if (episode_len_ < 1) throw ConfigError("GoalEnv: episode length must be >= 1");
  if (init_box_.dim() != static_cast<std::size_t>(model_->state_dim()))
    throw ShapeError("GoalEnv: initial-state box dimension mismatch");
  if (goal_box_.dim() != static_cast<std::size_t>(goal_dim_))
    throw ShapeError("GoalEnv: goal box dimension mismatch");
  if (action_box_.dim() != static_cast<std::size_t>(model_->action_dim()))
    throw ShapeError("GoalEnv: action box dimension mismatch");
  for (const auto& psi : scenarios_.params) model_->validate_scenario(psi);
}

GoalObservation GoalEnv::reset(Rng& rng) const {
  GoalObservation obs;
  obs.state.resize(init_box_.dim());
  for (std::size_t i = 0; i < obs.state.size(); ++i)
    obs.state[i] = rng.uniform(init_box_.lower[i], init_box_.upper[i]);
  obs.desired_goal.resize(goal_dim_);
  for (std::size_t i = 0; i < obs.desired_goal.size(); ++i)
    obs.desired_goal[i] = rng.uniform(goal_box_.lower[i], goal_box_.upper[i]);
  obs.achieved_goal.resize(goal_dim_);
  goal_map_(obs.state, obs.achieved_goal);
  obs.step = 0;
  return obs;
}

GoalObservation GoalEnv::observe(std::vector<double> state, std::vector<double> goal) const {
  if (state.size() != static_cast<std::size_t>(model_->state_dim()) ||
      goal.size() != static_cast<std::size_t>(goal_dim_))
    throw ShapeError("GoalEnv::observe: dimension mismatch");
  GoalObservation obs;
  obs.state = std::move(state);
  obs.desired_goal = std::move(goal);
  obs.achieved_goal.resize(goal_dim_);
  goal_map_(obs.state, obs.achieved_goal);
  obs.step = 0;
  return obs;
}

GoalEnv::StepResult GoalEnv::step(const GoalObservation& obs, std::span<const double> action,
                                  Rng& rng) const {
  if (action.size() != static_cast<std::size_t>(model_->action_dim()))
    throw ShapeError("GoalEnv::step: action dimension mismatch");
  std::vector<double> u(action.begin(), action.end());
  action_box_.clamp(u);

  StepResult res;
  res.scenario_index = static_cast<int>(rng.uniform_index(scenarios_.size()));
  res.obs.state.resize(obs.state.size());
  res.obs.desired_goal = obs.desired_goal;
  res.obs.achieved_goal.resize(goal_dim_);
  res.obs.step = obs.step + 1;
  try {
    model_->step(obs.state, u, scenarios_[res.scenario_index], res.obs.state);
  } catch (const NumericalError&) {
    res.failed = true;
  }
  if (!res.failed && !num::all_finite(res.obs.state)) res.failed = true;
  if (res.failed) {
    res.obs.state = obs.state;
    goal_map_(res.obs.state, res.obs.achieved_goal);
    res.reward = 0.0;
    res.done = true;
    return res;
  }
  goal_map_(res.obs.state, res.obs.achieved_goal);
  res.reward = gaussian_reward(res.obs.achieved_goal, res.obs.desired_goal, sigma_sq_);
  res.done = res.obs.step >= episode_len_;
  return res;
}

std::vector<std::vector<double>> GoalEnv::branch_all(std::span<const double> state,
                                                     std::span<const double> action) const {
  std::vector<double> u(action.begin(), action.end());
  action_box_.clamp(u);
  std::vector<std::vector<double>> out(scenarios_.size());
  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    out[i].resize(state.size());
    model_->step(state, u, scenarios_[i], out[i]);
  }
  return out;
}

}  // namespace hf::envs
