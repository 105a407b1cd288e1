#pragma once

#include <vector>

#include "hf/common/error.hpp"

namespace hf::rl {

// Dense Q table over (state, goal, action) with a mutable step size, for
// small verification MDPs.
struct TabularQ {
  int n_states = 0, n_goals = 0, n_actions = 0;
  double alpha = 0.1;
  std::vector<double> table;

  TabularQ(int ns, int ng, int na, double alpha_ = 0.1)
      : n_states(ns), n_goals(ng), n_actions(na), alpha(alpha_) {
    if (ns < 1 || ng < 1 || na < 1)
      throw ConfigError("TabularQ: all dimensions must be >= 1");
    table.assign(static_cast<std::size_t>(ns) * ng * na, 0.0);
  }

  std::size_t idx(int s, int g, int a) const {
    if (s < 0 || s >= n_states || g < 0 || g >= n_goals || a < 0 || a >= n_actions)
      throw Error("TabularQ: index out of range");
    return (static_cast<std::size_t>(s) * n_goals + g) * n_actions + a;
  }
  double& q(int s, int g, int a) { return table[idx(s, g, a)]; }
  double q(int s, int g, int a) const { return table[idx(s, g, a)]; }

  double max_q(int s, int g) const {
    double best = q(s, g, 0);
    for (int a = 1; a < n_actions; ++a) best = std::max(best, q(s, g, a));
    return best;
  }
};

// Q(s,g,a) <- (1-alpha) Q + alpha (r + gamma max_a' Q(s',g,a')).
void tabular_q_update(TabularQ& t, int s, int g, int a, double r, int next_s, double gamma);

}  // namespace hf::rl
