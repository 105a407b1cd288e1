#include "hf/envs/cstr_setup.hpp"

#include "hf/common/error.hpp"

namespace hf::envs {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw ConfigError("linspace: need at least two points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

ScenarioSet cstr_training_scenarios(const CstrSetup& setup, int grid_n) {
  auto alphas = linspace(setup.alpha_min, setup.alpha_max, grid_n);
  auto betas = linspace(setup.beta_min, setup.beta_max, grid_n);
  ScenarioSet set;
  set.params.reserve(alphas.size() * betas.size());
  for (double a : alphas)
    for (double b : betas) set.params.push_back(dynamics::ScenarioParam::cstr(a, b));
  return set;
}

ScenarioSet cstr_evaluation_scenarios(const CstrSetup& setup, int grid_n) {
  auto alphas = linspace(setup.alpha_min, setup.alpha_max, grid_n);
  auto betas = linspace(setup.beta_min, setup.beta_max, grid_n);
  ScenarioSet set;
  set.params.reserve(static_cast<std::size_t>(grid_n - 1) * (grid_n - 1));
  for (int i = 0; i + 1 < grid_n; ++i)
    for (int j = 0; j + 1 < grid_n; ++j)
      set.params.push_back(dynamics::ScenarioParam::cstr(0.5 * (alphas[i] + alphas[i + 1]),
                                                         0.5 * (betas[j] + betas[j + 1])));
  return set;
}

ScenarioSet cstr_mpc_scenarios(const CstrSetup& setup) {
  ScenarioSet set;
  for (double a : {setup.alpha_min, 1.0, setup.alpha_max})
    for (double b : {setup.beta_min, 1.0, setup.beta_max})
      set.params.push_back(dynamics::ScenarioParam::cstr(a, b));
  return set;
}

ScenarioSet cstr_nominal_scenario() {
  return {{dynamics::ScenarioParam::nominal()}};
}

GoalEnv make_cstr_env(const CstrSetup& setup, ScenarioSet scenarios) {
  auto model = std::make_shared<dynamics::CstrModel>(setup.sim);
  GoalMap goal_map = [](std::span<const double> state, std::span<double> goal) {
    goal[0] = state[1];  // c_B
  };
  return GoalEnv(std::move(model), std::move(scenarios), std::move(goal_map), 1, setup.sigma_sq,
                 setup.state_box, setup.goal_box, setup.action_box, setup.episode_len);
}

}  // namespace hf::envs
