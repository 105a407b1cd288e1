#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "hf/rl/agent.hpp"

namespace hf::cli {

// Checkpoint directory layout:
//   agent.json   manifest: feature scaling, gamma/tau/noise, file names,
//                plus whatever extra fields the caller records (seed, steps)
//   actor.net, critic.net, actor_target.net, critic_target.net
// Files are written deterministically: same agent + extra => same bytes.
void save_agent(const std::filesystem::path& dir, const rl::ActorCritic& ac,
                nlohmann::json extra);

// Loads the manifest and all four networks; ConfigError on missing or
// malformed files. The manifest is returned through meta_out when non-null.
rl::ActorCritic load_agent(const std::filesystem::path& dir,
                           nlohmann::json* meta_out = nullptr);

// ConfigError unless the checkpoint's dimensions match the environment.
void check_agent_env(const rl::ActorCritic& ac, const envs::GoalEnv& env);

}  // namespace hf::cli
