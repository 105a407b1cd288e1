#include "hf/lqr/lqr.hpp"

#include <Eigen/Dense>

#include "hf/common/error.hpp"

namespace hf::lqr {

namespace {

using Mat = Eigen::MatrixXd;
using Map = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>;

Mat to_eigen(const num::Tensor& t) {
  return Map(t.data.data(), t.rows, t.cols);
}

num::Tensor from_eigen(const Mat& m) {
  num::Tensor t(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.at(i, j) = m(i, j);
  return t;
}

void validate(const LqrProblem& prob) {
  int n = prob.a.rows, m = prob.b.cols;
  if (prob.a.cols != n || prob.b.rows != n || prob.m.rows != n || prob.m.cols != n ||
      prob.r.rows != m || prob.r.cols != m)
    throw ShapeError("solve_dare: inconsistent problem dimensions");
  if (!(prob.gamma >= 0.0 && prob.gamma <= 1.0))
    throw ConfigError("solve_dare: discount must lie in [0, 1]");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(prob.m.at(i, j) - prob.m.at(j, i)) > 1e-12)
        throw ConfigError("solve_dare: M must be symmetric");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(prob.r.at(i, j) - prob.r.at(j, i)) > 1e-12)
        throw ConfigError("solve_dare: R must be symmetric");
}

}  // namespace

LqrSolution solve_dare(const LqrProblem& prob, double tol, int max_iters) {
  validate(prob);
  const Mat a = to_eigen(prob.a);
  const Mat b = to_eigen(prob.b);
  const Mat m = to_eigen(prob.m);
  const Mat r = to_eigen(prob.r);
  const double g = prob.gamma;

  auto riccati_map = [&](const Mat& p) -> Mat {
    Mat s = r + g * b.transpose() * p * b;
    Eigen::LDLT<Mat> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-300)
      throw NumericalError("solve_dare: R + g B'PB is not positive definite");
    Mat bpa = b.transpose() * p * a;
    return m + g * a.transpose() * p * a - g * g * bpa.transpose() * ldlt.solve(bpa);
  };

  Mat p = m;
  int it = 0;
  double res = std::numeric_limits<double>::infinity();
  for (; it < max_iters; ++it) {
    Mat next = riccati_map(p);
    res = (next - p).cwiseAbs().maxCoeff();
    p = 0.5 * (next + next.transpose());  // keep symmetry against drift
    if (!p.allFinite()) throw NumericalError("solve_dare: iteration diverged");
    if (res <= tol) break;
  }
  if (res > tol)
    throw SolverError("solve_dare: no convergence within max_iters (residual " +
                      std::to_string(res) + ")");

  Mat s = r + g * b.transpose() * p * b;
  Mat k = g * Eigen::LDLT<Mat>(s).solve(b.transpose() * p * a);

  LqrSolution sol;
  sol.p = from_eigen(p);
  sol.k = from_eigen(k);
  sol.residual = (riccati_map(p) - p).cwiseAbs().maxCoeff();
  sol.iterations = it + 1;
  return sol;
}

void lqr_policy(const LqrSolution& sol, std::span<const double> x, std::span<double> u) {
  int m = sol.k.rows, n = sol.k.cols;
  if (x.size() != static_cast<std::size_t>(n) || u.size() != static_cast<std::size_t>(m))
    throw ShapeError("lqr_policy: dimension mismatch");
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += sol.k.at(i, j) * x[j];
    u[i] = -acc;
  }
}

double quad_value(const num::Tensor& p, std::span<const double> x) {
  int n = p.rows;
  if (p.cols != n || x.size() != static_cast<std::size_t>(n))
    throw ShapeError("quad_value: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += x[i] * p.at(i, j) * x[j];
  return acc;
}

}  // namespace hf::lqr
