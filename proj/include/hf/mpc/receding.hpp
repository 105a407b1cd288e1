#pragma once

#include <span>

#include "hf/common/rng.hpp"
#include "hf/envs/env.hpp"
#include "hf/envs/metrics.hpp"
#include "hf/mpc/solver.hpp"

namespace hf::mpc {

struct RecedingResult {
  envs::Trajectory trajectory;   // one point per executed step (post-step state)
  double time_near_goal = 0.0;   // summed Gaussian goal reward over the run
  double time_outside = 0.0;     // summed constraint score over the run, <= 0
  int solver_failures = 0;       // steps where the planner found no finite cost
  bool plant_failed = false;     // plant reached a non-finite state; run truncated
};

// Closed loop: plan, apply the shared first action to the plant, shift the
// plan one step as the next warm start, repeat. The plant draws its own
// scenario each step; the planner sees only the problem's scenario subset.
// When a solve fails the previous action is held (box center on the first
// step). Steps after the first use the refine budget.
RecedingResult receding_horizon_run(const MpcProblem& prob, const envs::GoalEnv& plant,
                                    int steps, std::span<const double> x0,
                                    std::span<const double> goal, Rng& rng);

// Same loop with the planner's restarts and the plant's scenario draws on
// separate streams, so paired comparisons can replay identical plant
// randomness under planners that consume different amounts of it.
RecedingResult receding_horizon_run(const MpcProblem& prob, const envs::GoalEnv& plant,
                                    int steps, std::span<const double> x0,
                                    std::span<const double> goal, Rng& solver_rng,
                                    Rng& plant_rng);

}  // namespace hf::mpc
