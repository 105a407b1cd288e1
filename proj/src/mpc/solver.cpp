#include "hf/mpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hf/common/error.hpp"
#include "hf/num/adam.hpp"

namespace hf::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

MpcSolver::MpcSolver(const MpcProblem& prob, const num::Tensor* tail_gain)
    : prob_(prob), graph_(prob, tail_gain) {
  if (tail_gain) gain_ = tail_gain->data;
}

SolveResult MpcSolver::solve(std::span<const double> x0, std::span<const double> goal,
                             const ActionPlan& warm, Rng& rng, bool refine) {
  validate_plan(prob_, warm);
  const SolverBudget& b = prob_.budget;
  int iters = b.iterations;
  int restarts = b.restarts;
  if (refine) {
    if (b.refine_iterations >= 0) iters = b.refine_iterations;
    if (b.refine_restarts >= 0) restarts = b.refine_restarts;
  }

  SolveResult res;
  const int nv = graph_.n_vars();
  if (nv == 0) {
    // nothing to optimize: the whole horizon is closed by the linear tail
    // (or there is no horizon), so return the policy action directly
    res.plan = warm;
    clamp_plan(prob_, res.plan);
    if (!gain_.empty() && prob_.n_controls() == 0) {
      const int n = prob_.state_dim(), m = prob_.action_dim();
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += gain_[static_cast<std::size_t>(i) * n + j] * x0[j];
        res.plan.u0[i] = -s;
      }
    }
    res.cost = graph_.cost(res.plan, x0, goal);
    res.start_costs = {res.cost};
    if (!std::isfinite(res.cost))
      throw SolverError("MpcSolver: no start reached a finite cost");
    return res;
  }

  // draw every start up front so the generator advances by a fixed amount
  std::vector<std::vector<double>> starts;
  starts.reserve(static_cast<std::size_t>(restarts) + 1);
  {
    std::vector<double> z(nv);
    graph_.plan_to_z(warm, z);
    starts.push_back(std::move(z));
  }
  for (int r = 0; r < restarts; ++r) {
    ActionPlan p = random_plan(prob_, rng);
    std::vector<double> z(nv);
    graph_.plan_to_z(p, z);
    starts.push_back(std::move(z));
  }

  std::vector<double> best_z;
  double best_cost = kInf;
  std::vector<double> grad(nv);
  for (auto& z : starts) {
    double start_best = kInf;
    std::vector<double> start_best_z = z;
    num::AdamState adam(static_cast<std::size_t>(nv), b.step_size);
    for (int it = 0; it < iters; ++it) {
      double c = graph_.cost_grad(z, x0, goal, grad);
      if (c < start_best) {
        start_best = c;
        start_best_z = z;
      }
      if (!std::isfinite(c) || !all_finite(grad)) break;
      adam.lr = iters > 1
                    ? b.step_size * std::pow(b.step_floor / b.step_size,
                                             static_cast<double>(it) / (iters - 1))
                    : b.step_size;
      num::adam_step(z, grad, adam);
      for (double& v : z) v = std::clamp(v, -1.0, 1.0);
    }
    double c = graph_.cost_z(z, x0, goal);
    if (c < start_best) {
      start_best = c;
      start_best_z = std::move(z);
    }
    res.start_costs.push_back(start_best);
    if (start_best < best_cost) {
      best_cost = start_best;
      best_z = std::move(start_best_z);
    }
  }
  if (!std::isfinite(best_cost))
    throw SolverError("MpcSolver: no start reached a finite cost");
  res.cost = best_cost;
  graph_.z_to_plan(best_z, res.plan);
  return res;
}

SolveResult solve(const MpcProblem& prob, std::span<const double> x0,
                  std::span<const double> goal, const ActionPlan& warm, Rng& rng,
                  bool refine) {
  if (prob.control_horizon >= 0 && prob.control_horizon != prob.horizon)
    throw ConfigError(
        "solve: steps past the control horizon need a linear tail; use nominal_linear_mpc");
  MpcSolver solver(prob);
  return solver.solve(x0, goal, warm, rng, refine);
}

SolveResult nominal_linear_mpc(const MpcProblem& prob, const lqr::LqrSolution& sol,
                               std::span<const double> x0, std::span<const double> goal,
                               const ActionPlan& warm, Rng& rng, bool refine) {
  MpcSolver solver(prob, &sol.k);
  return solver.solve(x0, goal, warm, rng, refine);
}

}  // namespace hf::mpc
