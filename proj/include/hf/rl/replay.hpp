#pragma once

#include <cstdint>
#include <vector>

#include "hf/common/rng.hpp"
#include "hf/envs/env.hpp"

namespace hf::rl {

struct Transition {
  envs::GoalObservation obs;
  std::vector<double> action;
  double reward = 0.0;
  envs::GoalObservation next_obs;
  bool done = false;
  int scenario_index = 0;
};

// Fixed-capacity ring; once full, new items overwrite the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return cap_; }
  std::uint64_t total_pushed() const { return total_; }
  const Transition& at(std::size_t i) const { return data_[i]; }
  const Transition& sample(Rng& rng) const;

 private:
  std::size_t cap_;
  std::size_t head_ = 0;
  std::uint64_t total_ = 0;
  std::vector<Transition> data_;
};

// Terminal-state hindsight relabeling: every transition of the episode is
// duplicated with desired_goal replaced by the goal actually achieved at the
// episode's final state, and the reward recomputed under the environment's
// goal reward. State, action, done and scenario fields are untouched.
std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const envs::GoalEnv& env);

}  // namespace hf::rl
