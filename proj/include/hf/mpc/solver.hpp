#pragma once

#include <span>
#include <vector>

#include "hf/common/rng.hpp"
#include "hf/lqr/lqr.hpp"
#include "hf/mpc/plan_graph.hpp"
#include "hf/mpc/problem.hpp"

namespace hf::mpc {

struct SolveResult {
  ActionPlan plan;
  double cost = 0.0;
  // best cost reached by each start (warm start first, then the random
  // restarts); +infinity for starts that never produced a finite cost
  std::vector<double> start_costs;
};

// Projected-gradient planner over the shared-first-action plan. The plan
// graph is built once; each solve runs multi-start Adam in box-normalized
// coordinates with a geometrically decaying step size, projecting onto the
// action box after every update. Deterministic given the generator state.
// The problem must outlive the solver.
class MpcSolver {
 public:
  explicit MpcSolver(const MpcProblem& prob, const num::Tensor* tail_gain = nullptr);

  const MpcProblem& problem() const { return prob_; }
  int n_vars() const { return graph_.n_vars(); }

  // warm must have the plan shape for the problem. refine selects the
  // reduced budget when one is configured. Throws SolverError when no start
  // reaches a finite cost.
  SolveResult solve(std::span<const double> x0, std::span<const double> goal,
                    const ActionPlan& warm, Rng& rng, bool refine = false);

 private:
  const MpcProblem& prob_;
  PlanGraph graph_;
  std::vector<double> gain_;  // row-major m x n when steps past N_c are closed
};

// One-off solve for problems whose decision variables cover the whole
// horizon (control_horizon of -1 or horizon).
SolveResult solve(const MpcProblem& prob, std::span<const double> x0,
                  std::span<const double> goal, const ActionPlan& warm, Rng& rng,
                  bool refine = false);

// Solve with steps t >= control_horizon closed by the linear policy
// u = -Kx from an LQR solution. With control_horizon 0 the returned first
// action is exactly -K x0.
SolveResult nominal_linear_mpc(const MpcProblem& prob, const lqr::LqrSolution& sol,
                               std::span<const double> x0, std::span<const double> goal,
                               const ActionPlan& warm, Rng& rng, bool refine = false);

}  // namespace hf::mpc
