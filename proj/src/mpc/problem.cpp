#include "hf/mpc/problem.hpp"

#include <algorithm>

#include "hf/common/error.hpp"

namespace hf::mpc {

StageKind stage_kind_from_string(const std::string& s) {
  if (s == "quadratic") return StageKind::Quadratic;
  if (s == "gaussian-goal" || s == "gaussian_goal") return StageKind::GaussianGoal;
  throw ConfigError("unknown stage kind: " + s);
}

TerminalKind terminal_kind_from_string(const std::string& s) {
  if (s == "none") return TerminalKind::None;
  if (s == "quadratic") return TerminalKind::Quadratic;
  if (s == "critic") return TerminalKind::Critic;
  throw ConfigError("unknown terminal kind: " + s);
}

void MpcProblem::validate() const {
  if (!model) throw ConfigError("MpcProblem: no dynamics model");
  const int n = state_dim(), m = action_dim();
  if (horizon < 0) throw ConfigError("MpcProblem: horizon must be >= 0");
  if (control_horizon > horizon)
    throw ConfigError("MpcProblem: control horizon exceeds horizon");
  if (scenarios.size() == 0) throw ConfigError("MpcProblem: empty scenario set");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("MpcProblem: gamma outside [0, 1]");
  if (static_cast<int>(state_box.dim()) != n)
    throw ConfigError("MpcProblem: state box dimension");
  if (static_cast<int>(action_box.dim()) != m)
    throw ConfigError("MpcProblem: action box dimension");
  if (terminal_box && static_cast<int>(terminal_box->dim()) != n)
    throw ConfigError("MpcProblem: terminal box dimension");
  if (penalty_weight < 0.0) throw ConfigError("MpcProblem: negative penalty weight");

  if (stage == StageKind::Quadratic) {
    if (stage_m.rows != n || stage_m.cols != n)
      throw ConfigError("MpcProblem: stage weight M must be state_dim x state_dim");
    if (stage_r.rows != m || stage_r.cols != m)
      throw ConfigError("MpcProblem: stage weight R must be action_dim x action_dim");
    if (!state_ref.empty() && static_cast<int>(state_ref.size()) != n)
      throw ConfigError("MpcProblem: state reference dimension");
    if (!action_ref.empty() && static_cast<int>(action_ref.size()) != m)
      throw ConfigError("MpcProblem: action reference dimension");
  } else {
    if (!(sigma_sq > 0.0)) throw ConfigError("MpcProblem: sigma_sq must be positive");
    if (goal_dim < 1 || !goal_map)
      throw ConfigError("MpcProblem: gaussian stage needs a goal map and goal_dim");
  }

  if (terminal == TerminalKind::Quadratic) {
    if (terminal_p.rows != n || terminal_p.cols != n)
      throw ConfigError("MpcProblem: terminal weight P must be state_dim x state_dim");
  } else if (terminal == TerminalKind::Critic) {
    if (!critic) throw ConfigError("MpcProblem: critic terminal without networks");
    if (goal_dim < 1 || !goal_map)
      throw ConfigError("MpcProblem: critic terminal needs a goal map and goal_dim");
    if (critic->norm.state_dim() != n || critic->norm.goal_dim() != goal_dim ||
        critic->norm.action_dim() != m)
      throw ConfigError("MpcProblem: critic dimensions do not match the problem");
  }

  if (budget.iterations < 1) throw ConfigError("MpcProblem: iteration budget must be >= 1");
  if (budget.restarts < 0) throw ConfigError("MpcProblem: negative restart budget");
  if (!(budget.step_size > 0.0) || !(budget.step_floor > 0.0) ||
      budget.step_floor > budget.step_size)
    throw ConfigError("MpcProblem: step sizes must satisfy 0 < floor <= step");
}

namespace {

std::size_t tail_len(const MpcProblem& prob) {
  int nc = prob.n_controls();
  return nc >= 2 ? static_cast<std::size_t>(nc - 1) * prob.action_dim() : 0;
}

}  // namespace

ActionPlan box_center_plan(const MpcProblem& prob) {
  const int m = prob.action_dim();
  ActionPlan plan;
  plan.u0.resize(m);
  for (int i = 0; i < m; ++i) plan.u0[i] = prob.action_box.center(i);
  std::size_t len = tail_len(prob);
  if (len > 0) {
    std::vector<double> tail(len);
    for (std::size_t j = 0; j < len; ++j) tail[j] = prob.action_box.center(j % m);
    plan.tails.assign(prob.scenarios.size(), tail);
  }
  return plan;
}

ActionPlan random_plan(const MpcProblem& prob, Rng& rng) {
  const int m = prob.action_dim();
  ActionPlan plan;
  plan.u0.resize(m);
  for (int i = 0; i < m; ++i)
    plan.u0[i] = rng.uniform(prob.action_box.lower[i], prob.action_box.upper[i]);
  std::size_t len = tail_len(prob);
  plan.tails.assign(len > 0 ? prob.scenarios.size() : 0, std::vector<double>(len));
  for (auto& tail : plan.tails)
    for (std::size_t j = 0; j < len; ++j)
      tail[j] = rng.uniform(prob.action_box.lower[j % m], prob.action_box.upper[j % m]);
  return plan;
}

ActionPlan shift_plan(const MpcProblem& prob, const ActionPlan& prev) {
  validate_plan(prob, prev);
  const int m = prob.action_dim();
  ActionPlan plan = prev;
  if (prev.tails.empty()) return plan;

  for (int i = 0; i < m; ++i) {
    double mean = 0.0;
    for (const auto& tail : prev.tails) mean += tail[i];
    plan.u0[i] = mean / static_cast<double>(prev.tails.size());
  }
  const std::size_t len = prev.tails[0].size();
  for (std::size_t s = 0; s < prev.tails.size(); ++s) {
    auto& tail = plan.tails[s];
    std::copy(prev.tails[s].begin() + m, prev.tails[s].end(), tail.begin());
    std::copy(prev.tails[s].end() - m, prev.tails[s].end(), tail.begin() + (len - m));
  }
  return plan;
}

void clamp_plan(const MpcProblem& prob, ActionPlan& plan) {
  const int m = prob.action_dim();
  prob.action_box.clamp(plan.u0);
  for (auto& tail : plan.tails)
    for (std::size_t j = 0; j < tail.size(); ++j)
      tail[j] = std::clamp(tail[j], prob.action_box.lower[j % m], prob.action_box.upper[j % m]);
}

void validate_plan(const MpcProblem& prob, const ActionPlan& plan) {
  if (plan.u0.size() != static_cast<std::size_t>(prob.action_dim()))
    throw ShapeError("ActionPlan: shared action dimension mismatch");
  std::size_t len = tail_len(prob);
  std::size_t want = len > 0 ? prob.scenarios.size() : 0;
  if (plan.tails.size() != want)
    throw ShapeError("ActionPlan: wrong number of scenario tails");
  for (const auto& tail : plan.tails)
    if (tail.size() != len) throw ShapeError("ActionPlan: tail length mismatch");
}

}  // namespace hf::mpc
