#include "hf/rl/replay.hpp"

#include "hf/common/error.hpp"

namespace hf::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : cap_(capacity) {
  if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < cap_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % cap_;
  }
  ++total_;
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  if (data_.empty()) throw Error("ReplayBuffer: sampling from an empty buffer");
  return data_[rng.uniform_index(data_.size())];
}

std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const envs::GoalEnv& env) {
  if (episode.empty()) throw ConfigError("her_relabel: empty episode");
  const std::vector<double>& terminal_goal = episode.back().next_obs.achieved_goal;
  std::vector<Transition> out;
  out.reserve(episode.size());
  for (const Transition& t : episode) {
    Transition r = t;
    r.obs.desired_goal = terminal_goal;
    r.next_obs.desired_goal = terminal_goal;
    r.reward = env.reward(r.next_obs.achieved_goal, terminal_goal);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hf::rl
