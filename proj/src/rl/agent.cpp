#include "hf/rl/agent.hpp"

#include <algorithm>
#include <cmath>

#include "hf/common/error.hpp"

namespace hf::rl {

void Normalizer::features(std::span<const double> state, std::span<const double> achieved,
                          std::span<const double> desired, std::span<double> out) const {
  if (state.size() != state_center.size() || achieved.size() != goal_scale.size() ||
      desired.size() != goal_scale.size() ||
      out.size() != static_cast<std::size_t>(feature_dim()))
    throw ShapeError("Normalizer::features: dimension mismatch");
  for (std::size_t i = 0; i < state.size(); ++i)
    out[i] = (state[i] - state_center[i]) / state_halfwidth[i];
  for (std::size_t i = 0; i < goal_scale.size(); ++i)
    out[state.size() + i] = (desired[i] - achieved[i]) * goal_scale[i];
}

void Normalizer::action_to_tanh(std::span<const double> u, std::span<double> z) const {
  for (std::size_t i = 0; i < u.size(); ++i)
    z[i] = (u[i] - action_center[i]) / action_halfwidth[i];
}

void Normalizer::action_from_tanh(std::span<const double> z, std::span<double> u) const {
  for (std::size_t i = 0; i < z.size(); ++i)
    u[i] = action_center[i] + action_halfwidth[i] * z[i];
}

Normalizer make_normalizer(const envs::GoalEnv& env) {
  Normalizer n;
  const auto& sb = env.init_box();
  for (std::size_t i = 0; i < sb.dim(); ++i) {
    n.state_center.push_back(sb.center(i));
    double hw = sb.halfwidth(i);
    n.state_halfwidth.push_back(hw > 0.0 ? hw : 1.0);
  }
  const auto& gb = env.goal_box();
  for (std::size_t i = 0; i < gb.dim(); ++i) {
    double hw = gb.halfwidth(i);
    n.goal_scale.push_back(hw > 0.0 ? 1.0 / hw : 1.0);
  }
  const auto& ab = env.action_box();
  for (std::size_t i = 0; i < ab.dim(); ++i) {
    n.action_center.push_back(ab.center(i));
    double hw = ab.halfwidth(i);
    n.action_halfwidth.push_back(hw > 0.0 ? hw : 1.0);
  }
  return n;
}

ActorCritic make_actor_critic(const envs::GoalEnv& env, const std::vector<int>& hidden,
                              std::uint64_t seed, double gamma, double tau,
                              double noise_scale) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw ConfigError("make_actor_critic: discount must lie in [0, 1)");
  ActorCritic ac;
  ac.norm = make_normalizer(env);
  std::vector<int> actor_sizes = {ac.norm.feature_dim()};
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  actor_sizes.push_back(ac.norm.action_dim());
  std::vector<int> critic_sizes = {ac.norm.feature_dim() + ac.norm.action_dim()};
  critic_sizes.insert(critic_sizes.end(), hidden.begin(), hidden.end());
  critic_sizes.push_back(1);

  ac.actor = num::mlp_init(actor_sizes, derive_seed(seed, 0), num::OutputActivation::Tanh);
  ac.critic = num::mlp_init(critic_sizes, derive_seed(seed, 1));
  ac.actor_target = ac.actor;
  ac.critic_target = ac.critic;
  ac.gamma = gamma;
  ac.tau = tau;
  ac.noise_scale = noise_scale;
  return ac;
}

void act(const num::MlpParams& actor, const Normalizer& norm,
         const envs::BoxConstraint& action_box, std::span<const double> state,
         std::span<const double> achieved, std::span<const double> desired,
         std::span<double> action_out) {
  std::vector<double> feat(norm.feature_dim());
  norm.features(state, achieved, desired, feat);
  auto out = num::mlp_forward(actor, feat);
  if (out.data.size() != action_out.size()) throw ShapeError("act: actor output dimension");
  if (actor.output == num::OutputActivation::Tanh) {
    norm.action_from_tanh(out.data, action_out);
  } else {
    std::copy(out.data.begin(), out.data.end(), action_out.begin());
  }
  action_box.clamp(action_out);
}

void act_noisy(const ActorCritic& ac, const envs::BoxConstraint& action_box,
               std::span<const double> state, std::span<const double> achieved,
               std::span<const double> desired, Rng& rng, std::span<double> action_out) {
  act(ac.actor, ac.norm, action_box, state, achieved, desired, action_out);
  for (std::size_t i = 0; i < action_out.size(); ++i) {
    double range = 2.0 * ac.norm.action_halfwidth[i];
    action_out[i] += ac.noise_scale * range * rng.normal();
  }
  action_box.clamp(action_out);
}

double q_value(const ActorCritic& ac, std::span<const double> state,
               std::span<const double> achieved, std::span<const double> desired,
               std::span<const double> action) {
  std::vector<double> in(ac.norm.feature_dim() + ac.norm.action_dim());
  ac.norm.features(state, achieved, desired, std::span<double>(in).first(ac.norm.feature_dim()));
  ac.norm.action_to_tanh(action,
                         std::span<double>(in).subspan(ac.norm.feature_dim()));
  return num::mlp_forward(ac.critic, in).data[0];
}

void polyak_update(num::MlpParams& target, const num::MlpParams& online, double tau) {
  if (target.flat.size() != online.flat.size())
    throw ShapeError("polyak_update: parameter count mismatch");
  for (std::size_t i = 0; i < target.flat.size(); ++i)
    target.flat[i] = (1.0 - tau) * target.flat[i] + tau * online.flat[i];
}

}  // namespace hf::rl
