#include "hf/envs/metrics.hpp"

#include <cmath>

#include "hf/common/csv.hpp"
#include "hf/common/error.hpp"

namespace hf::envs {

double time_near_goal(const std::vector<std::vector<double>>& achieved,
                      std::span<const double> goal, double sigma_sq) {
  double acc = 0.0;
  for (const auto& a : achieved) acc += gaussian_reward(a, goal, sigma_sq);
  return acc;
}

double time_outside_constraints(const std::vector<std::vector<double>>& states,
                                const BoxConstraint& box, double sigma_sq) {
  if (!(sigma_sq > 0.0))
    throw ConfigError("time_outside_constraints: variance must be positive");
  double acc = 0.0;
  std::vector<double> prox(box.dim());
  for (const auto& s : states) {
    box.prox(s, prox);
    double d2 = 0.0;
    for (std::size_t i = 0; i < prox.size(); ++i) {
      double d = s[i] - prox[i];
      d2 += d * d;
    }
    acc += std::exp(-d2 / (2.0 * sigma_sq)) - 1.0;
  }
  return acc;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& state_names,
                          const std::vector<std::string>& action_names) {
  std::vector<std::string> header = {"step"};
  header.insert(header.end(), state_names.begin(), state_names.end());
  header.insert(header.end(), action_names.begin(), action_names.end());
  header.push_back("reward");
  header.push_back("scenario_index");
  CsvWriter csv(path, header);
  for (const auto& pt : traj) {
    if (pt.state.size() != state_names.size() || pt.action.size() != action_names.size())
      throw ShapeError("write_trajectory_csv: column count mismatch");
    std::vector<std::string> row;
    row.reserve(header.size());
    row.push_back(std::to_string(pt.step));
    for (double v : pt.state) row.push_back(fmt_double(v));
    for (double v : pt.action) row.push_back(fmt_double(v));
    row.push_back(fmt_double(pt.reward));
    row.push_back(std::to_string(pt.scenario_index));
    csv.row(row);
  }
}

}  // namespace hf::envs
