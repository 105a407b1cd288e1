#pragma once

#include <cstdint>
#include <vector>

#include "hf/rl/agent.hpp"

namespace hf::rl {

struct EvalOptions {
  int n_starts = 200;
  int horizon = 50;
  int tail = 25;  // scored suffix of each rollout
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RolloutEval {
  double tail_reward = 0.0;   // mean goal reward over the tail
  double tail_pct_err = 0.0;  // mean 100*||achieved-g||/||g|| over the tail
  int scenario_index = 0;     // index into the evaluation scenario set
};

// Noise-free rollouts from sampled starts/goals, each under one fixed
// scenario drawn from eval_scenarios. Per-rollout rng streams are derived
// from the seed, so results are identical for any thread count.
std::vector<RolloutEval> evaluate_rl(const num::MlpParams& actor, const Normalizer& norm,
                                     const envs::GoalEnv& env,
                                     const envs::ScenarioSet& eval_scenarios,
                                     const EvalOptions& opts);

double median(std::vector<double> v);

}  // namespace hf::rl
