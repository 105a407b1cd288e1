#include "hf/cli/agent_io.hpp"

#include <fstream>

#include "hf/common/error.hpp"
#include "hf/num/checkpoint.hpp"

namespace hf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void save_agent(const fs::path& dir, const rl::ActorCritic& ac, json extra) {
  fs::create_directories(dir);
  json manifest = std::move(extra);
  manifest["format"] = "rgvf-agent";
  manifest["version"] = 1;
  manifest["gamma"] = ac.gamma;
  manifest["tau"] = ac.tau;
  manifest["noise_scale"] = ac.noise_scale;
  manifest["normalizer"] = {{"state_center", ac.norm.state_center},
                            {"state_halfwidth", ac.norm.state_halfwidth},
                            {"goal_scale", ac.norm.goal_scale},
                            {"action_center", ac.norm.action_center},
                            {"action_halfwidth", ac.norm.action_halfwidth}};
  manifest["files"] = {{"actor", "actor.net"},
                       {"critic", "critic.net"},
                       {"actor_target", "actor_target.net"},
                       {"critic_target", "critic_target.net"}};

  num::save_mlp(dir / "actor.net", ac.actor, {{"role", "actor"}});
  num::save_mlp(dir / "critic.net", ac.critic, {{"role", "critic"}});
  num::save_mlp(dir / "actor_target.net", ac.actor_target, {{"role", "actor_target"}});
  num::save_mlp(dir / "critic_target.net", ac.critic_target, {{"role", "critic_target"}});

  std::ofstream out(dir / "agent.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / "agent.json").string());
  out << manifest.dump(2) << '\n';
}

rl::ActorCritic load_agent(const fs::path& dir, json* meta_out) {
  std::ifstream in(dir / "agent.json", std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint manifest: " + (dir / "agent.json").string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint manifest " + (dir / "agent.json").string() + ": " +
                      e.what());
  }
  if (manifest.value("format", "") != "rgvf-agent")
    throw ConfigError((dir / "agent.json").string() + " is not an agent checkpoint");

  rl::ActorCritic ac;
  try {
    const json& n = manifest.at("normalizer");
    ac.norm.state_center = n.at("state_center").get<std::vector<double>>();
    ac.norm.state_halfwidth = n.at("state_halfwidth").get<std::vector<double>>();
    ac.norm.goal_scale = n.at("goal_scale").get<std::vector<double>>();
    ac.norm.action_center = n.at("action_center").get<std::vector<double>>();
    ac.norm.action_halfwidth = n.at("action_halfwidth").get<std::vector<double>>();
    ac.gamma = manifest.at("gamma").get<double>();
    ac.tau = manifest.at("tau").get<double>();
    ac.noise_scale = manifest.at("noise_scale").get<double>();
    const json& files = manifest.at("files");
    ac.actor = num::load_mlp(dir / files.at("actor").get<std::string>());
    ac.critic = num::load_mlp(dir / files.at("critic").get<std::string>());
    ac.actor_target = num::load_mlp(dir / files.at("actor_target").get<std::string>());
    ac.critic_target = num::load_mlp(dir / files.at("critic_target").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError("incomplete checkpoint manifest " + (dir / "agent.json").string() + ": " +
                      e.what());
  }

  const int feat = ac.norm.feature_dim();
  if (ac.actor.in_dim() != feat || ac.actor.out_dim() != ac.norm.action_dim() ||
      ac.critic.in_dim() != feat + ac.norm.action_dim() || ac.critic.out_dim() != 1)
    throw ConfigError("checkpoint networks do not match the recorded feature scaling");
  if (meta_out) *meta_out = std::move(manifest);
  return ac;
}

void check_agent_env(const rl::ActorCritic& ac, const envs::GoalEnv& env) {
  if (ac.norm.state_dim() != env.state_dim() || ac.norm.goal_dim() != env.goal_dim() ||
      ac.norm.action_dim() != env.action_dim())
    throw ConfigError("checkpoint dimensions do not match the configured environment");
}

}  // namespace hf::cli
