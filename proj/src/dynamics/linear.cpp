#include "hf/dynamics/linear.hpp"

#include "hf/common/error.hpp"
#include "hf/kernels/kernels.hpp"

namespace hf::dynamics {

void linear_step(const LinearSystem& sys, std::span<const double> x,
                 std::span<const double> u, std::span<double> out) {
  auto n = static_cast<std::size_t>(sys.a.rows);
  auto m = static_cast<std::size_t>(sys.b.cols);
  if (static_cast<std::size_t>(sys.a.cols) != n || static_cast<std::size_t>(sys.b.rows) != n)
    throw ShapeError("linear_step: A must be n x n and B n x m");
  if (x.size() != n || u.size() != m || out.size() != n)
    throw ShapeError("linear_step: x/u/out dimensions disagree with system");
  std::vector<double> bu(n);
  const auto& k = kernels::active();
  int ni = static_cast<int>(n), mi = static_cast<int>(m);
  k.matvec(ni, ni, sys.a.data.data(), x.data(), out.data());
  k.matvec(ni, mi, sys.b.data.data(), u.data(), bu.data());
  k.axpy(ni, 1.0, bu.data(), out.data());
}

LinearModel::LinearModel(LinearSystem sys)
    : LinearModel(std::move(sys), {}) {}

LinearModel::LinearModel(LinearSystem sys, std::vector<double> disturbance)
    : sys_(std::move(sys)), disturbance_(std::move(disturbance)) {
  auto n = static_cast<std::size_t>(sys_.a.rows);
  if (static_cast<std::size_t>(sys_.a.cols) != n || static_cast<std::size_t>(sys_.b.rows) != n)
    throw ShapeError("LinearModel: A must be n x n and B n x m");
  if (disturbance_.empty()) disturbance_.assign(n, 1.0);
  if (disturbance_.size() != n)
    throw ShapeError("LinearModel: disturbance direction must have state dimension");
}

void LinearModel::step(std::span<const double> x, std::span<const double> u,
                       const ScenarioParam& psi, std::span<double> out) const {
  linear_step(sys_, x, u, out);
  if (psi.shift != 0.0)
    kernels::active().axpy(static_cast<int>(out.size()), psi.shift, disturbance_.data(),
                           out.data());
}

num::NodeId LinearModel::step_node(num::Tape& t, num::NodeId x, num::NodeId u,
                                   const ScenarioParam& psi) const {
  int n = static_cast<int>(sys_.a.rows);
  num::NodeId a = t.constant(sys_.a.data, n, static_cast<int>(sys_.a.cols));
  num::NodeId b = t.constant(sys_.b.data, n, static_cast<int>(sys_.b.cols));
  num::NodeId next = t.add(t.linear(a, x, -1), t.linear(b, u, -1));
  if (psi.shift != 0.0) {
    std::vector<double> off(disturbance_);
    for (double& v : off) v *= psi.shift;
    next = t.add(next, t.constant(off, 1, n));
  }
  return next;
}

LinearModel scalar_integrator(double dt) {
  LinearSystem sys;
  sys.a = num::Tensor(1, 1);
  sys.a.data = {1.0};
  sys.b = num::Tensor(1, 1);
  sys.b.data = {dt};
  return LinearModel(std::move(sys));
}

LinearSystem double_integrator(double dt) {
  LinearSystem sys;
  sys.a = num::Tensor(2, 2);
  sys.a.data = {1.0, dt, 0.0, 1.0};
  sys.b = num::Tensor(2, 1);
  sys.b.data = {0.5 * dt * dt, dt};
  return sys;
}

}  // namespace hf::dynamics
