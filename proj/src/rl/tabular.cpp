#include "hf/rl/tabular.hpp"

#include <algorithm>

namespace hf::rl {

void tabular_q_update(TabularQ& t, int s, int g, int a, double r, int next_s, double gamma) {
  const double target = r + gamma * t.max_q(next_s, g);
  double& cell = t.q(s, g, a);
  cell = (1.0 - t.alpha) * cell + t.alpha * target;
}

}  // namespace hf::rl
