#pragma once

#include <span>
#include <vector>

#include "hf/common/rng.hpp"
#include "hf/envs/env.hpp"
#include "hf/num/mlp.hpp"

namespace hf::rl {

// Fixed feature scaling derived from the environment boxes. Networks see
// the state mapped to roughly [-1, 1] per dimension, the goal error
// (desired - achieved) divided by the goal-box halfwidth, and actions in
// tanh space ((u - center) / halfwidth).
struct Normalizer {
  std::vector<double> state_center, state_halfwidth;
  std::vector<double> goal_scale;
  std::vector<double> action_center, action_halfwidth;

  int state_dim() const { return static_cast<int>(state_center.size()); }
  int goal_dim() const { return static_cast<int>(goal_scale.size()); }
  int action_dim() const { return static_cast<int>(action_center.size()); }
  int feature_dim() const { return state_dim() + goal_dim(); }

  // normalized state followed by scaled goal error; out has feature_dim()
  void features(std::span<const double> state, std::span<const double> achieved,
                std::span<const double> desired, std::span<double> out) const;
  void action_to_tanh(std::span<const double> u, std::span<double> z) const;
  void action_from_tanh(std::span<const double> z, std::span<double> u) const;
};

Normalizer make_normalizer(const envs::GoalEnv& env);

struct ActorCritic {
  num::MlpParams actor;          // feature_dim -> action_dim, tanh output
  num::MlpParams critic;         // feature_dim + action_dim -> 1
  num::MlpParams actor_target;   // Polyak copies
  num::MlpParams critic_target;
  Normalizer norm;
  double gamma = 0.98;
  double tau = 0.005;
  double noise_scale = 0.1;  // stddev as a fraction of the action range
};

ActorCritic make_actor_critic(const envs::GoalEnv& env, const std::vector<int>& hidden,
                              std::uint64_t seed, double gamma = 0.98, double tau = 0.005,
                              double noise_scale = 0.1);

// Deterministic policy evaluated into the action box. Tanh-output actors are
// rescaled from tanh space; identity-output actors are taken as raw
// box-space actions. Either way the result is clamped to the box.
void act(const num::MlpParams& actor, const Normalizer& norm,
         const envs::BoxConstraint& action_box, std::span<const double> state,
         std::span<const double> achieved, std::span<const double> desired,
         std::span<double> action_out);

// act() plus Gaussian exploration noise with stddev noise_scale * range.
void act_noisy(const ActorCritic& ac, const envs::BoxConstraint& action_box,
               std::span<const double> state, std::span<const double> achieved,
               std::span<const double> desired, Rng& rng, std::span<double> action_out);

// Online critic at a box-space action.
double q_value(const ActorCritic& ac, std::span<const double> state,
               std::span<const double> achieved, std::span<const double> desired,
               std::span<const double> action);

// target <- (1 - tau) * target + tau * online
void polyak_update(num::MlpParams& target, const num::MlpParams& online, double tau);

}  // namespace hf::rl
