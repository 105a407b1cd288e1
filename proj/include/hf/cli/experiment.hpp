#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hf/cli/config.hpp"
#include "hf/envs/cstr_setup.hpp"
#include "hf/envs/env.hpp"
#include "hf/mpc/problem.hpp"
#include "hf/rl/evaluate.hpp"
#include "hf/rl/trainer.hpp"

namespace hf::cli {

// Run-level settings from command-line flags / HF_* environment variables;
// unset fields fall back to the config file, then to defaults.
struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
};

enum class EnvKind { Cstr, Linear };
EnvKind env_kind_from_string(const std::string& s);
std::string to_string(EnvKind k);

// The configured benchmark, unpacked into the pieces commands build
// environments and planner problems from.
struct Experiment {
  EnvKind kind = EnvKind::Cstr;
  envs::CstrSetup setup;  // populated for the cstr kind

  envs::BoxConstraint state_box, goal_box, action_box, init_box;
  double env_sigma_sq = 1e-4;
  int episode_len = 50;

  std::shared_ptr<const dynamics::DynamicsModel> plant_model;
  std::shared_ptr<const dynamics::DynamicsModel> planner_model;
  dynamics::SimConfig plant_sim{}, planner_sim{};

  envs::ScenarioSet train_scenarios, eval_scenarios, mpc_scenarios, nominal_scenario;

  int goal_state_index = 0;  // which state coordinate the goal tracks
  envs::GoalMap goal_map;
  mpc::GoalMapNode goal_map_node;
};

Experiment make_experiment(const ConfigFile& cfg);

// training | nominal | evaluation | mpc
const envs::ScenarioSet& scenario_set_by_name(const Experiment& ex, const std::string& name);

envs::GoalEnv make_env(const Experiment& ex, const envs::ScenarioSet& scenarios);

std::uint64_t resolve_seed(const ConfigFile& cfg, const RunOptions& opts);
std::filesystem::path resolve_out(const ConfigFile& cfg, const RunOptions& opts);

rl::TrainConfig make_train_config(const ConfigFile& cfg, std::uint64_t seed);
rl::EvalOptions make_eval_options(const ConfigFile& cfg, std::uint64_t seed, int threads);

// goal-reward planner used by the combined agent (critic terminal by default)
mpc::MpcProblem make_unified_problem(const ConfigFile& cfg, const Experiment& ex,
                                     const rl::ActorCritic* critic);
// quadratic tracking baseline; call set_goal_ref before each solve sequence
mpc::MpcProblem make_baseline_problem(const ConfigFile& cfg, const Experiment& ex);
void set_goal_ref(mpc::MpcProblem& prob, const Experiment& ex, double goal_value);

}  // namespace hf::cli
