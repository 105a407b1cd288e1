#include <cmath>

#include "hf/kernels/kernels.hpp"

namespace hf::kernels {
namespace {

double s_dot(int n, const double* x, const double* y) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void s_axpy(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_axpby(int n, double a, const double* x, double b, double* y) {
  for (int i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void s_scale_add(int n, double a, double b, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

void s_vadd(int n, const double* x, const double* y, double* z) {
  for (int i = 0; i < n; ++i) z[i] = x[i] + y[i];
}

void s_vsub(int n, const double* x, const double* y, double* z) {
  for (int i = 0; i < n; ++i) z[i] = x[i] - y[i];
}

void s_vmul(int n, const double* x, const double* y, double* z) {
  for (int i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void s_vfma3(int n, double c, const double* x, const double* y, double* z) {
  for (int i = 0; i < n; ++i) z[i] += c * x[i] * y[i];
}

void s_vrelu(int n, const double* x, double* z) {
  for (int i = 0; i < n; ++i) z[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_vrelu_bwd(int n, const double* x, const double* dy, double* dx) {
  for (int i = 0; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

void s_vtanh_bwd(int n, const double* y, const double* dy, double* dx) {
  for (int i = 0; i < n; ++i) dx[i] += (1.0 - y[i] * y[i]) * dy[i];
}

void s_vadd_scalar(int n, double c, double* x) {
  for (int i = 0; i < n; ++i) x[i] += c;
}

double s_vsum(int n, const double* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void s_matvec(int m, int n, const double* a, const double* x, double* y) {
  for (int r = 0; r < m; ++r) y[r] = s_dot(n, a + static_cast<std::size_t>(r) * n, x);
}

void s_matvec_t_acc(int m, int n, const double* a, const double* y, double* x) {
  for (int r = 0; r < m; ++r) s_axpy(n, y[r], a + static_cast<std::size_t>(r) * n, x);
}

void s_ger_acc(int m, int n, const double* x, const double* y, double* a) {
  for (int r = 0; r < m; ++r) s_axpy(n, x[r], y, a + static_cast<std::size_t>(r) * n);
}

void s_adam(int n, double* p, const double* g, double* m, double* v, double lr, double b1,
            double b2, double eps, double c1, double c2) {
  for (int i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t{
      "scalar",   s_dot,       s_axpy,      s_axpby,        s_scale_add, s_vadd,
      s_vsub,     s_vmul,      s_vfma3,     s_vrelu,        s_vrelu_bwd, s_vtanh_bwd,
      s_vadd_scalar, s_vsum,   s_matvec,    s_matvec_t_acc, s_ger_acc,   s_adam,
  };
  return t;
}

}  // namespace hf::kernels
