#pragma once

#include <span>
#include <vector>

#include "hf/mpc/problem.hpp"
#include "hf/num/mlp.hpp"
#include "hf/num/tape.hpp"

namespace hf::mpc {

// Online actor and critic attached to a tape as constant parameter views,
// plus the feature-scaling constants they expect.
struct CriticNodes {
  num::MlpOnTape actor, critic;
  num::NodeId state_center = -1, state_inv_hw = -1, goal_scale = -1;
};

CriticNodes attach_critic(num::Tape& t, const rl::ActorCritic& ac);

// V(x, g) = Q(x, mu(x, g), g) on the tape, differentiable through x and g.
num::NodeId critic_value_node(num::Tape& t, const CriticNodes& cn, const GoalMapNode& gm,
                              num::NodeId x, num::NodeId goal);

// Same value evaluated directly (no tape); gm projects states to goals.
double critic_terminal(const rl::ActorCritic& ac, const envs::GoalMap& gm,
                       std::span<const double> x, std::span<const double> goal);

// The scenario-tree rollout cost as one reusable computation graph. Decision
// variables live in leaf views; successive solves only rewrite buffers and
// re-run forward/backward. Gradients are exposed in box-normalized action
// coordinates z, where u = center + halfwidth * z and z is clamped to [-1,1].
class PlanGraph {
 public:
  // tail_gain: optional m x n LQR gain closing steps t >= N_c as u = -Kx
  PlanGraph(const MpcProblem& prob, const num::Tensor* tail_gain = nullptr);

  int n_vars() const { return n_vars_; }

  void plan_to_z(const ActionPlan& plan, std::span<double> z) const;
  void z_to_plan(std::span<const double> z, ActionPlan& plan) const;

  // cost of the plan after projection onto the action box; non-finite
  // rollouts come back as +infinity
  double cost(const ActionPlan& plan, std::span<const double> x0,
              std::span<const double> goal);
  double cost_z(std::span<const double> z, std::span<const double> x0,
                std::span<const double> goal);
  // cost plus d(cost)/dz; grad entries are set, not accumulated
  double cost_grad(std::span<const double> z, std::span<const double> x0,
                   std::span<const double> goal, std::span<double> grad);

 private:
  void write_state_goal(std::span<const double> x0, std::span<const double> goal);
  void write_z(std::span<const double> z);
  double run_forward();

  num::NodeId stage_node(num::NodeId x, num::NodeId u, int t);
  num::NodeId terminal_node(num::NodeId x);
  num::NodeId hinge_node(num::NodeId x, num::NodeId lb, num::NodeId ub);
  num::NodeId quad_form(num::NodeId x, num::NodeId w, num::NodeId ref);

  const MpcProblem& prob_;
  int n_ = 0, m_ = 0, nc_ = 0, n_vars_ = 0;
  std::vector<double> center_, scale_;  // action-box normalization per coordinate

  std::vector<double> x0_buf_, goal_buf_, u0_buf_;
  std::vector<std::vector<double>> tail_bufs_;

  num::Tape tape_;
  num::NodeId x0_node_ = -1, goal_node_ = -1, u0_node_ = -1;
  std::vector<num::NodeId> tail_nodes_;
  num::NodeId state_lb_ = -1, state_ub_ = -1, term_lb_ = -1, term_ub_ = -1;
  num::NodeId stage_m_node_ = -1, stage_r_node_ = -1, state_ref_node_ = -1,
              action_ref_node_ = -1, terminal_p_node_ = -1, k_node_ = -1;
  CriticNodes critic_;
  num::NodeId cost_node_ = -1;
};

// Average over the scenario subset of the rolled-out stage and terminal
// terms; the contract realized by PlanGraph, packaged for one-off calls.
double plan_cost(const MpcProblem& prob, const ActionPlan& plan,
                 std::span<const double> x0, std::span<const double> goal);

}  // namespace hf::mpc
