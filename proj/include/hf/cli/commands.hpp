#pragma once

#include "hf/cli/config.hpp"
#include "hf/cli/experiment.hpp"

namespace hf::cli {

// Each command returns a process exit code (0 success) and throws
// ConfigError for configuration problems (exit 2 at the top level) or other
// hf::Error types for runtime failures (exit 3).

// Trains the configured agent; writes checkpoint/ (agent.json + .net files)
// and train_metrics.csv (step,episode,return,critic_loss,actor_objective,
// buffer_size) under the output directory.
int cmd_train(const ConfigFile& cfg, const RunOptions& opts);

// Rolls out the checkpointed actor noise-free; writes eval_metrics.csv
// (mode,rollout,scenario_index,tail_reward,tail_pct_err) with one row per
// rollout under each requested evaluation mode.
int cmd_eval_rl(const ConfigFile& cfg, const RunOptions& opts);

// Paired rollouts of the three agents (quadratic-tracking planner "mpc",
// checkpointed actor "rl", goal-reward planner with critic terminal
// "rl_mpc"); writes compare_metrics.csv (agent,rollout,metric,value).
int cmd_compare(const ConfigFile& cfg, const RunOptions& opts);

// One paired rollout per agent from a fixed start and goal; writes
// profile_traces.csv (agent,step,<state...>,<action...>,reward,
// scenario_index).
int cmd_profile(const ConfigFile& cfg, const RunOptions& opts);

// Prints the Riccati solution for a configured linear system and checks the
// planner against the closed-form policy at random states.
int cmd_lqr_demo(const ConfigFile& cfg, const RunOptions& opts);

}  // namespace hf::cli
