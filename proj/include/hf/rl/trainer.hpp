#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hf/num/adam.hpp"
#include "hf/num/tape.hpp"
#include "hf/rl/agent.hpp"
#include "hf/rl/replay.hpp"

namespace hf::rl {

// Sampled bootstraps through one drawn next state per transition; FullBranch
// averages the bootstrap over every scenario's successor (variance reduction
// at N_s times the cost).
enum class TargetMode { Sampled, FullBranch };

TargetMode target_mode_from_string(const std::string& s);
std::string to_string(TargetMode m);

struct TrainConfig {
  std::int64_t total_steps = 100000;
  int batch_size = 256;
  std::size_t buffer_capacity = 1000000;
  int warmup_steps = 1000;  // uniform-random actions, no updates
  TargetMode target_mode = TargetMode::Sampled;
  bool her = true;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};
  double updates_per_step = 1.0;
  double gamma = 0.98;
  double tau = 0.005;
  double noise_scale = 0.1;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
};

struct EpisodeMetrics {
  std::int64_t step = 0;  // env steps completed when the episode ended
  int episode = 0;
  double ret = 0.0;  // undiscounted episode return
  double critic_loss = 0.0;       // mean over the episode's updates
  double actor_objective = 0.0;   // mean over the episode's updates
  std::size_t buffer_size = 0;
};

// Bootstrap targets r + g*(1-done)*V' with V' from the target networks;
// FullBranch averages V' over branch_all successors.
std::vector<double> critic_targets(const std::vector<const Transition*>& batch,
                                   const ActorCritic& ac, const envs::GoalEnv& env,
                                   TargetMode mode);

// Owns the update graphs (built once for a fixed batch size) and the Adam
// states. The actor tape applies the online critic through const parameter
// views, so each actor step sees the critic parameters updated immediately
// before it.
class Trainer {
 public:
  Trainer(ActorCritic& ac, const envs::GoalEnv& env, const TrainConfig& cfg);

  // One critic descent step, one actor ascent step, one Polyak blend.
  // Returns (critic loss, actor objective) as evaluated before the updates.
  std::pair<double, double> update_step(const std::vector<const Transition*>& batch);

 private:
  void collect_grads(const num::Tape& tape, const num::MlpOnTape& net,
                     const num::MlpParams& params, std::vector<double>& out) const;

  ActorCritic& ac_;
  const envs::GoalEnv& env_;
  TrainConfig cfg_;
  int batch_;

  std::vector<double> crit_in_, crit_tgt_, feat_;
  num::Tape ctape_, atape_;
  num::MlpOnTape cnet_, anet_, cnet_const_;
  num::NodeId closs_ = -1, aobj_ = -1;
  std::vector<double> cgrad_, agrad_;
  num::AdamState copt_, aopt_;
};

struct TrainResult {
  ActorCritic ac;
  std::vector<EpisodeMetrics> metrics;
  int episodes = 0;
  int dropped_episodes = 0;
};

TrainResult train(const envs::GoalEnv& env, const TrainConfig& cfg);

}  // namespace hf::rl
