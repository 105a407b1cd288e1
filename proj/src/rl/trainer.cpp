#include "hf/rl/trainer.hpp"

#include <cmath>

#include "hf/common/error.hpp"

namespace hf::rl {

TargetMode target_mode_from_string(const std::string& s) {
  if (s == "sampled") return TargetMode::Sampled;
  if (s == "full-branch" || s == "full_branch") return TargetMode::FullBranch;
  throw ConfigError("unknown target mode: " + s);
}

std::string to_string(TargetMode m) {
  return m == TargetMode::Sampled ? "sampled" : "full-branch";
}

std::vector<double> critic_targets(const std::vector<const Transition*>& batch,
                                   const ActorCritic& ac, const envs::GoalEnv& env,
                                   TargetMode mode) {
  if (batch.empty()) throw ConfigError("critic_targets: empty batch");
  const Normalizer& norm = ac.norm;
  int fd = norm.feature_dim(), ad = norm.action_dim();
  std::vector<double> feat(fd), cin(fd + ad), achieved(norm.goal_dim());
  std::vector<double> out(batch.size());

  auto bootstrap = [&](const std::vector<double>& state, std::span<const double> ach,
                       const std::vector<double>& goal) {
    norm.features(state, ach, goal, feat);
    auto a = num::mlp_forward(ac.actor_target, feat);
    std::copy(feat.begin(), feat.end(), cin.begin());
    std::copy(a.data.begin(), a.data.end(), cin.begin() + fd);
    return num::mlp_forward(ac.critic_target, cin).data[0];
  };

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    double q = t.reward;
    if (!t.done) {
      double v = 0.0;
      if (mode == TargetMode::Sampled) {
        v = bootstrap(t.next_obs.state, t.next_obs.achieved_goal, t.next_obs.desired_goal);
      } else {
        auto branches = env.branch_all(t.obs.state, t.action);
        for (const auto& s : branches) {
          env.map_goal(s, achieved);
          v += bootstrap(s, achieved, t.obs.desired_goal);
        }
        v /= static_cast<double>(branches.size());
      }
      q += ac.gamma * v;
    }
    out[i] = q;
  }
  return out;
}

Trainer::Trainer(ActorCritic& ac, const envs::GoalEnv& env, const TrainConfig& cfg)
    : ac_(ac), env_(env), cfg_(cfg), batch_(cfg.batch_size) {
  if (batch_ < 1) throw ConfigError("Trainer: batch size must be >= 1");
  if (ac_.actor.output != num::OutputActivation::Tanh)
    throw ConfigError("Trainer: training requires a tanh-output actor");
  const Normalizer& norm = ac_.norm;
  int fd = norm.feature_dim(), ad = norm.action_dim();

  crit_in_.assign(static_cast<std::size_t>(batch_) * (fd + ad), 0.0);
  crit_tgt_.assign(batch_, 0.0);
  feat_.assign(static_cast<std::size_t>(batch_) * fd, 0.0);

  num::NodeId cin = ctape_.leaf_view(static_cast<const double*>(crit_in_.data()), batch_, fd + ad);
  num::NodeId ctg = ctape_.leaf_view(static_cast<const double*>(crit_tgt_.data()), batch_, 1);
  cnet_ = num::attach_mlp(ctape_, ac_.critic, true);
  num::NodeId q = num::mlp_apply(ctape_, cnet_, cin);
  closs_ = ctape_.mean(ctape_.square(ctape_.sub(q, ctg)));

  num::NodeId afeat = atape_.leaf_view(static_cast<const double*>(feat_.data()), batch_, fd);
  anet_ = num::attach_mlp(atape_, ac_.actor, true);
  cnet_const_ = num::attach_mlp(atape_, std::as_const(ac_).critic);
  num::NodeId a = num::mlp_apply(atape_, anet_, afeat);
  num::NodeId qa = num::mlp_apply(atape_, cnet_const_, atape_.concat(afeat, a));
  aobj_ = atape_.mean(qa);

  cgrad_.assign(ac_.critic.flat.size(), 0.0);
  agrad_.assign(ac_.actor.flat.size(), 0.0);
  copt_ = num::AdamState(ac_.critic.flat.size(), cfg_.critic_lr);
  aopt_ = num::AdamState(ac_.actor.flat.size(), cfg_.actor_lr);
}

void Trainer::collect_grads(const num::Tape& tape, const num::MlpOnTape& net,
                            const num::MlpParams& params, std::vector<double>& out) const {
  for (int l = 0; l < params.num_layers(); ++l) {
    auto gw = tape.grad(net.w[l]);
    std::copy(gw.begin(), gw.end(), out.begin() + params.weight_offset(l));
    auto gb = tape.grad(net.b[l]);
    std::copy(gb.begin(), gb.end(), out.begin() + params.bias_offset(l));
  }
}

std::pair<double, double> Trainer::update_step(const std::vector<const Transition*>& batch) {
  if (static_cast<int>(batch.size()) != batch_)
    throw ShapeError("Trainer::update_step: batch size mismatch");
  const Normalizer& norm = ac_.norm;
  int fd = norm.feature_dim(), ad = norm.action_dim();

  auto targets = critic_targets(batch, ac_, env_, cfg_.target_mode);
  std::copy(targets.begin(), targets.end(), crit_tgt_.begin());
  for (int r = 0; r < batch_; ++r) {
    const Transition& t = *batch[r];
    std::span<double> cin(crit_in_.data() + static_cast<std::size_t>(r) * (fd + ad),
                          static_cast<std::size_t>(fd + ad));
    norm.features(t.obs.state, t.obs.achieved_goal, t.obs.desired_goal, cin.first(fd));
    norm.action_to_tanh(t.action, cin.subspan(fd));
    std::copy(cin.begin(), cin.begin() + fd,
              feat_.begin() + static_cast<std::size_t>(r) * fd);
  }

  ctape_.forward();
  double closs = ctape_.scalar(closs_);
  if (!std::isfinite(closs))
    throw NumericalError("training aborted: non-finite critic loss");
  ctape_.backward(closs_);
  collect_grads(ctape_, cnet_, ac_.critic, cgrad_);
  num::adam_step(ac_.critic.flat, cgrad_, copt_);

  atape_.forward();
  double aobj = atape_.scalar(aobj_);
  if (!std::isfinite(aobj))
    throw NumericalError("training aborted: non-finite actor objective");
  atape_.backward(aobj_);
  collect_grads(atape_, anet_, ac_.actor, agrad_);
  for (double& g : agrad_) g = -g;  // ascend the objective
  num::adam_step(ac_.actor.flat, agrad_, aopt_);

  polyak_update(ac_.actor_target, ac_.actor, ac_.tau);
  polyak_update(ac_.critic_target, ac_.critic, ac_.tau);
  return {closs, aobj};
}

TrainResult train(const envs::GoalEnv& env, const TrainConfig& cfg) {
  if (cfg.total_steps > 0 && cfg.warmup_steps >= cfg.total_steps)
    throw ConfigError("train: warmup must be smaller than total steps");

  TrainResult result;
  result.ac = make_actor_critic(env, cfg.hidden, derive_seed(cfg.seed, 0), cfg.gamma, cfg.tau,
                                cfg.noise_scale);
  if (cfg.total_steps == 0) return result;

  Trainer trainer(result.ac, env, cfg);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng env_rng(derive_seed(cfg.seed, 1));
  Rng act_rng(derive_seed(cfg.seed, 2));
  Rng sample_rng(derive_seed(cfg.seed, 3));

  const auto& abox = env.action_box();
  std::vector<double> action(env.action_dim());
  std::vector<const Transition*> batch(cfg.batch_size);
  std::vector<Transition> episode;
  episode.reserve(env.episode_len());

  auto obs = env.reset(env_rng);
  double ep_return = 0.0;
  double closs_sum = 0.0, aobj_sum = 0.0;
  std::int64_t ep_updates = 0;
  double update_debt = 0.0;

  for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
    if (step <= cfg.warmup_steps) {
      for (std::size_t i = 0; i < action.size(); ++i)
        action[i] = act_rng.uniform(abox.lower[i], abox.upper[i]);
    } else {
      act_noisy(result.ac, abox, obs.state, obs.achieved_goal, obs.desired_goal, act_rng,
                action);
    }

    auto res = env.step(obs, action, env_rng);
    Transition t;
    t.obs = obs;
    t.action = action;
    abox.clamp(t.action);  // store the executed action
    t.reward = res.reward;
    t.next_obs = res.obs;
    t.done = res.done;
    t.scenario_index = res.scenario_index;
    episode.push_back(std::move(t));
    ep_return += res.reward;

    if (res.failed) {
      ++result.dropped_episodes;
      episode.clear();
      obs = env.reset(env_rng);
      ep_return = 0.0;
    } else if (res.done) {
      auto relabeled = cfg.her ? her_relabel(episode, env) : std::vector<Transition>{};
      for (auto& tr : episode) buffer.push(std::move(tr));
      for (auto& tr : relabeled) buffer.push(std::move(tr));
      episode.clear();

      ++result.episodes;
      EpisodeMetrics m;
      m.step = step;
      m.episode = result.episodes;
      m.ret = ep_return;
      m.critic_loss = ep_updates ? closs_sum / ep_updates : 0.0;
      m.actor_objective = ep_updates ? aobj_sum / ep_updates : 0.0;
      m.buffer_size = buffer.size();
      result.metrics.push_back(m);
      ep_return = 0.0;
      closs_sum = aobj_sum = 0.0;
      ep_updates = 0;
      obs = env.reset(env_rng);
    } else {
      obs = res.obs;
    }

    if (step > cfg.warmup_steps &&
        buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      update_debt += cfg.updates_per_step;
      while (update_debt >= 1.0) {
        update_debt -= 1.0;
        for (auto& slot : batch) slot = &buffer.sample(sample_rng);
        auto [closs, aobj] = trainer.update_step(batch);
        closs_sum += closs;
        aobj_sum += aobj;
        ++ep_updates;
      }
    }
  }
  return result;
}

}  // namespace hf::rl
