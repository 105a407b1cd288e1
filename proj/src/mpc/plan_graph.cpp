#include "hf/mpc/plan_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hf/common/error.hpp"

namespace hf::mpc {

CriticNodes attach_critic(num::Tape& t, const rl::ActorCritic& ac) {
  CriticNodes cn;
  cn.actor = num::attach_mlp(t, ac.actor);
  cn.critic = num::attach_mlp(t, ac.critic);
  const rl::Normalizer& norm = ac.norm;
  cn.state_center = t.constant(norm.state_center, 1, norm.state_dim());
  std::vector<double> inv_hw(norm.state_halfwidth.size());
  for (std::size_t i = 0; i < inv_hw.size(); ++i) inv_hw[i] = 1.0 / norm.state_halfwidth[i];
  cn.state_inv_hw = t.constant(inv_hw, 1, norm.state_dim());
  cn.goal_scale = t.constant(norm.goal_scale, 1, norm.goal_dim());
  return cn;
}

num::NodeId critic_value_node(num::Tape& t, const CriticNodes& cn, const GoalMapNode& gm,
                              num::NodeId x, num::NodeId goal) {
  num::NodeId xs = t.mul(t.sub(x, cn.state_center), cn.state_inv_hw);
  num::NodeId achieved = gm(t, x);
  num::NodeId ge = t.mul(t.sub(goal, achieved), cn.goal_scale);
  num::NodeId feat = t.concat(xs, ge);
  num::NodeId a = num::mlp_apply(t, cn.actor, feat);
  return num::mlp_apply(t, cn.critic, t.concat(feat, a));
}

double critic_terminal(const rl::ActorCritic& ac, const envs::GoalMap& gm,
                       std::span<const double> x, std::span<const double> goal) {
  std::vector<double> achieved(ac.norm.goal_dim());
  gm(x, achieved);
  std::vector<double> feat(ac.norm.feature_dim());
  ac.norm.features(x, achieved, goal, feat);
  auto a = num::mlp_forward(ac.actor, feat);
  std::vector<double> cin(feat);
  cin.insert(cin.end(), a.data.begin(), a.data.end());
  return num::mlp_forward(ac.critic, cin).data[0];
}

PlanGraph::PlanGraph(const MpcProblem& prob, const num::Tensor* tail_gain) : prob_(prob) {
  prob_.validate();
  n_ = prob_.state_dim();
  m_ = prob_.action_dim();
  nc_ = prob_.n_controls();
  if (nc_ < prob_.horizon && !tail_gain)
    throw ConfigError("PlanGraph: control horizon below horizon requires a tail gain");
  if (tail_gain && (tail_gain->rows != m_ || tail_gain->cols != n_))
    throw ConfigError("PlanGraph: tail gain must be action_dim x state_dim");
  for (const auto& psi : prob_.scenarios.params) prob_.model->validate_scenario(psi);

  center_.resize(m_);
  scale_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    center_[i] = prob_.action_box.center(i);
    double hw = prob_.action_box.halfwidth(i);
    scale_[i] = hw > 0.0 ? hw : 1.0;
  }

  const int ns = static_cast<int>(prob_.scenarios.size());
  const std::size_t tlen = nc_ >= 2 ? static_cast<std::size_t>(nc_ - 1) * m_ : 0;
  n_vars_ = nc_ >= 1 ? m_ + ns * static_cast<int>(tlen) : 0;

  x0_buf_.assign(n_, 0.0);
  goal_buf_.assign(prob_.goal_dim, 0.0);
  u0_buf_.assign(m_, 0.0);
  tail_bufs_.assign(tlen > 0 ? ns : 0, std::vector<double>(tlen, 0.0));

  x0_node_ = tape_.leaf_view(static_cast<const double*>(x0_buf_.data()), 1, n_);
  if (prob_.goal_dim > 0)
    goal_node_ = tape_.leaf_view(static_cast<const double*>(goal_buf_.data()), 1,
                                 prob_.goal_dim);
  if (nc_ >= 1) u0_node_ = tape_.leaf_view(u0_buf_.data(), 1, m_, true);
  for (auto& buf : tail_bufs_)
    tail_nodes_.push_back(tape_.leaf_view(buf.data(), 1, static_cast<int>(tlen), true));

  state_lb_ = tape_.constant(prob_.state_box.lower, 1, n_);
  state_ub_ = tape_.constant(prob_.state_box.upper, 1, n_);
  const envs::BoxConstraint& tbox = prob_.terminal_box_or_default();
  term_lb_ = tape_.constant(tbox.lower, 1, n_);
  term_ub_ = tape_.constant(tbox.upper, 1, n_);

  if (prob_.stage == StageKind::Quadratic) {
    stage_m_node_ = tape_.constant(prob_.stage_m.data, n_, n_);
    stage_r_node_ = tape_.constant(prob_.stage_r.data, m_, m_);
    if (!prob_.state_ref.empty()) state_ref_node_ = tape_.constant(prob_.state_ref, 1, n_);
    if (!prob_.action_ref.empty())
      action_ref_node_ = tape_.constant(prob_.action_ref, 1, m_);
  }
  if (prob_.terminal == TerminalKind::Quadratic)
    terminal_p_node_ = tape_.constant(prob_.terminal_p.data, n_, n_);
  if (prob_.terminal == TerminalKind::Critic) critic_ = attach_critic(tape_, *prob_.critic);
  if (tail_gain) k_node_ = tape_.constant(tail_gain->data, m_, n_);

  num::NodeId total = -1;
  for (int i = 0; i < ns; ++i) {
    num::NodeId x = x0_node_;
    num::NodeId ci = -1;
    for (int t = 0; t < prob_.horizon; ++t) {
      num::NodeId u;
      if (t >= nc_) {
        u = tape_.affine(tape_.linear(k_node_, x, -1), -1.0, 0.0);
      } else if (t == 0) {
        u = u0_node_;
      } else {
        u = tape_.slice(tail_nodes_[i], (t - 1) * m_, m_);
      }
      num::NodeId s = stage_node(x, u, t);
      ci = ci < 0 ? s : tape_.add(ci, s);
      x = prob_.model->step_node(tape_, x, u, prob_.scenarios[i]);
    }
    num::NodeId term = terminal_node(x);
    ci = ci < 0 ? term : tape_.add(ci, term);
    total = total < 0 ? ci : tape_.add(total, ci);
  }
  cost_node_ = ns > 1 ? tape_.affine(total, 1.0 / ns, 0.0) : total;
}

num::NodeId PlanGraph::hinge_node(num::NodeId x, num::NodeId lb, num::NodeId ub) {
  return tape_.sum(tape_.add(tape_.relu(tape_.sub(lb, x)), tape_.relu(tape_.sub(x, ub))));
}

num::NodeId PlanGraph::quad_form(num::NodeId x, num::NodeId w, num::NodeId ref) {
  num::NodeId d = ref >= 0 ? tape_.sub(x, ref) : x;
  return tape_.sum(tape_.mul(d, tape_.linear(w, d, -1)));
}

num::NodeId PlanGraph::stage_node(num::NodeId x, num::NodeId u, int t) {
  num::NodeId s;
  if (prob_.stage == StageKind::Quadratic) {
    s = tape_.add(quad_form(x, stage_m_node_, state_ref_node_),
                  quad_form(u, stage_r_node_, action_ref_node_));
    if (prob_.penalty_weight != 0.0)
      s = tape_.add(s, tape_.affine(hinge_node(x, state_lb_, state_ub_),
                                    prob_.penalty_weight, 0.0));
  } else {
    num::NodeId achieved = prob_.goal_map(tape_, x);
    num::NodeId reward = tape_.exp(tape_.affine(
        tape_.sum(tape_.square(tape_.sub(goal_node_, achieved))),
        -0.5 / prob_.sigma_sq, 0.0));
    if (prob_.penalty_weight != 0.0) {
      s = tape_.sub(tape_.affine(hinge_node(x, state_lb_, state_ub_),
                                 prob_.penalty_weight, 0.0),
                    reward);
    } else {
      s = tape_.affine(reward, -1.0, 0.0);
    }
  }
  double gt = std::pow(prob_.gamma, t);
  return gt != 1.0 ? tape_.affine(s, gt, 0.0) : s;
}

num::NodeId PlanGraph::terminal_node(num::NodeId x) {
  num::NodeId term = -1;
  if (prob_.penalty_weight != 0.0)
    term = tape_.affine(hinge_node(x, term_lb_, term_ub_), prob_.penalty_weight, 0.0);
  if (prob_.terminal == TerminalKind::Quadratic) {
    num::NodeId q = quad_form(x, terminal_p_node_, state_ref_node_);
    term = term < 0 ? q : tape_.add(term, q);
  } else if (prob_.terminal == TerminalKind::Critic) {
    num::NodeId v = tape_.affine(
        critic_value_node(tape_, critic_, prob_.goal_map, x, goal_node_), -1.0, 0.0);
    term = term < 0 ? v : tape_.add(term, v);
  }
  if (term < 0) term = tape_.constant_scalar(0.0);
  double gn = std::pow(prob_.gamma, prob_.horizon);
  return gn != 1.0 ? tape_.affine(term, gn, 0.0) : term;
}

void PlanGraph::plan_to_z(const ActionPlan& plan, std::span<double> z) const {
  if (static_cast<int>(z.size()) != n_vars_) throw ShapeError("plan_to_z: z length");
  validate_plan(prob_, plan);
  if (n_vars_ == 0) return;
  std::size_t k = 0;
  for (int i = 0; i < m_; ++i)
    z[k++] = std::clamp((plan.u0[i] - center_[i]) / scale_[i], -1.0, 1.0);
  for (const auto& tail : plan.tails)
    for (std::size_t j = 0; j < tail.size(); ++j) {
      int c = static_cast<int>(j % m_);
      z[k++] = std::clamp((tail[j] - center_[c]) / scale_[c], -1.0, 1.0);
    }
}

void PlanGraph::z_to_plan(std::span<const double> z, ActionPlan& plan) const {
  if (static_cast<int>(z.size()) != n_vars_) throw ShapeError("z_to_plan: z length");
  plan.u0.assign(m_, 0.0);
  plan.tails.assign(tail_bufs_.size(),
                    std::vector<double>(tail_bufs_.empty() ? 0 : tail_bufs_[0].size()));
  if (n_vars_ == 0) {
    for (int i = 0; i < m_; ++i) plan.u0[i] = center_[i];
    return;
  }
  std::size_t k = 0;
  for (int i = 0; i < m_; ++i)
    plan.u0[i] = std::clamp(center_[i] + scale_[i] * z[k++], prob_.action_box.lower[i],
                            prob_.action_box.upper[i]);
  for (auto& tail : plan.tails)
    for (std::size_t j = 0; j < tail.size(); ++j) {
      int c = static_cast<int>(j % m_);
      tail[j] = std::clamp(center_[c] + scale_[c] * z[k++], prob_.action_box.lower[c],
                           prob_.action_box.upper[c]);
    }
}

void PlanGraph::write_state_goal(std::span<const double> x0, std::span<const double> goal) {
  if (x0.size() != x0_buf_.size()) throw ShapeError("PlanGraph: x0 dimension");
  if (goal.size() != goal_buf_.size()) throw ShapeError("PlanGraph: goal dimension");
  std::copy(x0.begin(), x0.end(), x0_buf_.begin());
  std::copy(goal.begin(), goal.end(), goal_buf_.begin());
}

void PlanGraph::write_z(std::span<const double> z) {
  if (static_cast<int>(z.size()) != n_vars_) throw ShapeError("PlanGraph: z length");
  if (n_vars_ == 0) return;
  std::size_t k = 0;
  for (int i = 0; i < m_; ++i)
    u0_buf_[i] = center_[i] + scale_[i] * std::clamp(z[k++], -1.0, 1.0);
  for (auto& buf : tail_bufs_)
    for (std::size_t j = 0; j < buf.size(); ++j) {
      int c = static_cast<int>(j % m_);
      buf[j] = center_[c] + scale_[c] * std::clamp(z[k++], -1.0, 1.0);
    }
}

double PlanGraph::run_forward() {
  tape_.forward();
  double c = tape_.scalar(cost_node_);
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

double PlanGraph::cost(const ActionPlan& plan, std::span<const double> x0,
                       std::span<const double> goal) {
  validate_plan(prob_, plan);
  write_state_goal(x0, goal);
  for (int i = 0; i < m_; ++i)
    u0_buf_[i] = std::clamp(plan.u0[i], prob_.action_box.lower[i], prob_.action_box.upper[i]);
  for (std::size_t s = 0; s < tail_bufs_.size(); ++s)
    for (std::size_t j = 0; j < tail_bufs_[s].size(); ++j) {
      int c = static_cast<int>(j % m_);
      tail_bufs_[s][j] =
          std::clamp(plan.tails[s][j], prob_.action_box.lower[c], prob_.action_box.upper[c]);
    }
  return run_forward();
}

double PlanGraph::cost_z(std::span<const double> z, std::span<const double> x0,
                         std::span<const double> goal) {
  write_state_goal(x0, goal);
  write_z(z);
  return run_forward();
}

double PlanGraph::cost_grad(std::span<const double> z, std::span<const double> x0,
                            std::span<const double> goal, std::span<double> grad) {
  if (grad.size() != z.size()) throw ShapeError("cost_grad: gradient length");
  double c = cost_z(z, x0, goal);
  if (!std::isfinite(c)) {
    std::fill(grad.begin(), grad.end(), 0.0);
    return c;
  }
  tape_.backward(cost_node_);
  if (n_vars_ == 0) return c;
  std::size_t k = 0;
  auto gu = tape_.grad(u0_node_);
  for (int i = 0; i < m_; ++i) grad[k++] = gu[i] * scale_[i];
  for (num::NodeId node : tail_nodes_) {
    auto gt = tape_.grad(node);
    for (std::size_t j = 0; j < gt.size(); ++j)
      grad[k++] = gt[j] * scale_[static_cast<int>(j % m_)];
  }
  return c;
}

double plan_cost(const MpcProblem& prob, const ActionPlan& plan,
                 std::span<const double> x0, std::span<const double> goal) {
  PlanGraph graph(prob);
  return graph.cost(plan, x0, goal);
}

}  // namespace hf::mpc
