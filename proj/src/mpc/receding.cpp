#include "hf/mpc/receding.hpp"

#include <vector>

#include "hf/common/error.hpp"

namespace hf::mpc {

RecedingResult receding_horizon_run(const MpcProblem& prob, const envs::GoalEnv& plant,
                                    int steps, std::span<const double> x0,
                                    std::span<const double> goal, Rng& rng) {
  return receding_horizon_run(prob, plant, steps, x0, goal, rng, rng);
}

RecedingResult receding_horizon_run(const MpcProblem& prob, const envs::GoalEnv& plant,
                                    int steps, std::span<const double> x0,
                                    std::span<const double> goal, Rng& solver_rng,
                                    Rng& plant_rng) {
  if (steps < 0) throw ConfigError("receding_horizon_run: steps must be >= 0");
  if (static_cast<int>(x0.size()) != plant.state_dim())
    throw ShapeError("receding_horizon_run: x0 dimension");
  if (static_cast<int>(goal.size()) != plant.goal_dim())
    throw ShapeError("receding_horizon_run: goal dimension");
  if (prob.goal_dim != 0 && prob.goal_dim != plant.goal_dim())
    throw ConfigError(
        "receding_horizon_run: problem goal dimension must be 0 or match the plant");
  // goal-free planners (quadratic stage, no critic) ignore the run goal
  std::span<const double> plan_goal = goal.subspan(0, static_cast<std::size_t>(prob.goal_dim));

  MpcSolver solver(prob);
  RecedingResult out;
  envs::GoalObservation obs =
      plant.observe(std::vector<double>(x0.begin(), x0.end()),
                    std::vector<double>(goal.begin(), goal.end()));
  ActionPlan warm = box_center_plan(prob);
  std::vector<double> held(plant.action_dim());
  for (int i = 0; i < plant.action_dim(); ++i)
    held[i] = plant.action_box().center(static_cast<std::size_t>(i));

  std::vector<std::vector<double>> achieved;
  std::vector<std::vector<double>> states;
  achieved.reserve(static_cast<std::size_t>(steps));
  states.reserve(static_cast<std::size_t>(steps));

  for (int t = 0; t < steps; ++t) {
    bool solved = true;
    ActionPlan plan;
    try {
      SolveResult res = solver.solve(obs.state, plan_goal, warm, solver_rng, /*refine=*/t > 0);
      plan = std::move(res.plan);
    } catch (const SolverError&) {
      ++out.solver_failures;
      solved = false;
    }
    std::vector<double> u = solved ? plan.u0 : held;
    plant.action_box().clamp(u);

    envs::GoalEnv::StepResult sr = plant.step(obs, u, plant_rng);
    out.trajectory.push_back({t, sr.obs.state, u, sr.reward, sr.scenario_index});
    if (sr.failed) {
      out.plant_failed = true;
      break;
    }
    states.push_back(sr.obs.state);
    achieved.push_back(sr.obs.achieved_goal);
    obs = std::move(sr.obs);
    held = std::move(u);
    if (solved) warm = shift_plan(prob, plan);
  }

  out.time_near_goal = envs::time_near_goal(achieved, goal);
  out.time_outside = envs::time_outside_constraints(states, prob.state_box);
  return out;
}

}  // namespace hf::mpc
