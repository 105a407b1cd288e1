#include "hf/rl/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hf/common/error.hpp"

namespace hf::rl {

namespace {

RolloutEval run_rollout(const num::MlpParams& actor, const Normalizer& norm,
                        const envs::GoalEnv& env, const envs::ScenarioSet& eval_scenarios,
                        const EvalOptions& opts, std::uint64_t rollout_seed) {
  Rng rng(rollout_seed);
  auto obs = env.reset(rng);
  std::size_t scen = rng.uniform_index(eval_scenarios.size());
  const auto& psi = eval_scenarios[scen];

  std::vector<double> action(env.action_dim()), next(env.state_dim());
  std::vector<double> achieved(env.goal_dim());
  std::vector<double> rewards, errs;
  rewards.reserve(opts.horizon);
  errs.reserve(opts.horizon);

  std::vector<double> state = obs.state;
  std::vector<double> goal = obs.desired_goal;
  env.map_goal(state, achieved);
  double goal_norm = 0.0;
  for (double g : goal) goal_norm += g * g;
  goal_norm = std::sqrt(goal_norm);

  for (int t = 0; t < opts.horizon; ++t) {
    act(actor, norm, env.action_box(), state, achieved, goal, action);
    bool ok = true;
    try {
      env.model().step(state, action, psi, next);
      ok = num::all_finite(next);
    } catch (const NumericalError&) {
      ok = false;
    }
    if (ok) state = next;  // on failure hold the last valid state
    env.map_goal(state, achieved);
    rewards.push_back(env.reward(achieved, goal));
    double d = 0.0;
    for (std::size_t i = 0; i < achieved.size(); ++i)
      d += (achieved[i] - goal[i]) * (achieved[i] - goal[i]);
    errs.push_back(100.0 * std::sqrt(d) / std::max(goal_norm, 1e-12));
  }

  RolloutEval ev;
  ev.scenario_index = static_cast<int>(scen);
  int tail = std::min(opts.tail, opts.horizon);
  if (tail > 0) {
    for (int t = opts.horizon - tail; t < opts.horizon; ++t) {
      ev.tail_reward += rewards[t] / tail;
      ev.tail_pct_err += errs[t] / tail;
    }
  }
  return ev;
}

}  // namespace

std::vector<RolloutEval> evaluate_rl(const num::MlpParams& actor, const Normalizer& norm,
                                     const envs::GoalEnv& env,
                                     const envs::ScenarioSet& eval_scenarios,
                                     const EvalOptions& opts) {
  if (opts.n_starts < 1) throw ConfigError("evaluate_rl: need at least one start");
  if (opts.horizon < 1) throw ConfigError("evaluate_rl: horizon must be >= 1");
  if (opts.tail < 1 || opts.tail > opts.horizon)
    throw ConfigError("evaluate_rl: tail must lie in [1, horizon]");
  if (eval_scenarios.size() == 0) throw ConfigError("evaluate_rl: empty scenario set");

  std::vector<RolloutEval> out(opts.n_starts);
  auto work = [&](int begin, int stride) {
    for (int i = begin; i < opts.n_starts; i += stride)
      out[i] = run_rollout(actor, norm, env, eval_scenarios, opts,
                           derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
  };

  int threads = std::max(1, opts.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of empty set");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace hf::rl
