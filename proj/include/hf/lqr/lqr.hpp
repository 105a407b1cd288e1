#pragma once

#include <span>

#include "hf/num/tensor.hpp"

namespace hf::lqr {

// Discounted discrete-time LQR: minimize sum gamma^t (x'Mx + u'Ru) subject to
// x_{t+1} = A x_t + B u_t.
struct LqrProblem {
  num::Tensor a;       // n x n
  num::Tensor b;       // n x m
  num::Tensor m;       // n x n, symmetric PSD
  num::Tensor r;       // m x m, symmetric PD
  double gamma = 1.0;  // in [0, 1]
};

struct LqrSolution {
  num::Tensor p;  // n x n, symmetric
  num::Tensor k;  // m x n
  double residual = 0.0;
  int iterations = 0;
};

// Fixed-point iteration of the discounted Riccati map starting from P = M:
//   P <- M + g A'PA - g^2 A'PB (R + g B'PB)^-1 B'PA
// K = g (R + g B'PB)^-1 B'PA. Throws SolverError when the residual has not
// reached tol within max_iters, NumericalError when (R + g B'PB) is singular.
LqrSolution solve_dare(const LqrProblem& prob, double tol = 1e-10, int max_iters = 100000);

// u = -K x
void lqr_policy(const LqrSolution& sol, std::span<const double> x, std::span<double> u);

// x' P x
double quad_value(const num::Tensor& p, std::span<const double> x);

}  // namespace hf::lqr
