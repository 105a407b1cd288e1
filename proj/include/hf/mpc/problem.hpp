#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hf/common/rng.hpp"
#include "hf/dynamics/model.hpp"
#include "hf/envs/env.hpp"
#include "hf/num/tape.hpp"
#include "hf/num/tensor.hpp"
#include "hf/rl/agent.hpp"

namespace hf::mpc {

enum class StageKind { Quadratic, GaussianGoal };
enum class TerminalKind { None, Quadratic, Critic };

StageKind stage_kind_from_string(const std::string& s);
TerminalKind terminal_kind_from_string(const std::string& s);

struct SolverBudget {
  int iterations = 300;
  int restarts = 4;            // random starts added on top of the warm start
  double step_size = 0.1;      // Adam step in box-normalized action coordinates
  double step_floor = 1e-8;    // the step decays geometrically to this
  int refine_iterations = -1;  // warm-started re-solves; -1 inherits the full budget
  int refine_restarts = -1;
};

// Differentiable projection of a state node into goal space.
using GoalMapNode = std::function<num::NodeId(num::Tape&, num::NodeId state)>;

// Scenario-tree optimal control problem over one dynamics model. The first
// action is shared across scenarios; each scenario owns its action tail.
struct MpcProblem {
  std::shared_ptr<const dynamics::DynamicsModel> model;
  int horizon = 5;          // N: prediction steps
  int control_horizon = -1; // N_c: free actions; steps beyond follow an LQR
                            // tail gain; -1 means N_c = N
  envs::ScenarioSet scenarios;
  double gamma = 1.0;       // stage terms weighted gamma^t, terminal gamma^N

  StageKind stage = StageKind::GaussianGoal;
  // quadratic kind: (x-x_ref)' M (x-x_ref) + (u-u_ref)' R (u-u_ref)
  num::Tensor stage_m, stage_r;
  std::vector<double> state_ref, action_ref;  // empty = origin
  // gaussian-goal kind: -exp(-||g - goalmap(x)||^2 / (2 sigma_sq))
  double sigma_sq = 0.0625;
  int goal_dim = 0;
  GoalMapNode goal_map;

  double penalty_weight = 1.0;  // weight on the L1 hinge distance outside the box

  TerminalKind terminal = TerminalKind::None;
  num::Tensor terminal_p;                    // quadratic terminal
  const rl::ActorCritic* critic = nullptr;   // critic terminal, non-owning

  envs::BoxConstraint state_box, action_box;
  std::optional<envs::BoxConstraint> terminal_box;  // defaults to state_box

  SolverBudget budget;

  int n_controls() const { return control_horizon < 0 ? horizon : control_horizon; }
  int state_dim() const { return model ? model->state_dim() : 0; }
  int action_dim() const { return model ? model->action_dim() : 0; }
  const envs::BoxConstraint& terminal_box_or_default() const {
    return terminal_box ? *terminal_box : state_box;
  }

  void validate() const;  // ConfigError on inconsistent dimensions or budgets
};

// Shared first action plus one action tail per scenario. The shared action is
// a single variable, so plans cannot disagree on it by construction.
struct ActionPlan {
  std::vector<double> u0;
  std::vector<std::vector<double>> tails;  // each (N_c - 1) * action_dim, row-major

  int action_dim() const { return static_cast<int>(u0.size()); }
};

ActionPlan box_center_plan(const MpcProblem& prob);
ActionPlan random_plan(const MpcProblem& prob, Rng& rng);
// Receding-horizon shift: the new shared action is the scenario mean of the
// old tails' first actions; each tail drops its head and repeats its last
// action. Plans without tails keep their shared action.
ActionPlan shift_plan(const MpcProblem& prob, const ActionPlan& prev);
void clamp_plan(const MpcProblem& prob, ActionPlan& plan);
void validate_plan(const MpcProblem& prob, const ActionPlan& plan);  // ShapeError

}  // namespace hf::mpc
