#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

// Dense f64 kernels behind a runtime-selected dispatch table. A scalar
// reference implementation always exists; AVX2 (x86) and NEON (aarch64)
// variants are selected at startup when the CPU supports them, or forced
// via the HF_KERNELS environment variable / set_backend().

namespace hf::kernels {

struct Table {
  const char* name;

  double (*dot)(int n, const double* x, const double* y);
  // y += a*x
  void (*axpy)(int n, double a, const double* x, double* y);
  // y = a*x + b*y
  void (*axpby)(int n, double a, const double* x, double b, double* y);
  // y = a*x + b
  void (*scale_add)(int n, double a, double b, const double* x, double* y);
  void (*vadd)(int n, const double* x, const double* y, double* z);
  void (*vsub)(int n, const double* x, const double* y, double* z);
  void (*vmul)(int n, const double* x, const double* y, double* z);
  // z += c * x * y  (elementwise)
  void (*vfma3)(int n, double c, const double* x, const double* y, double* z);
  // z = max(x, 0)
  void (*vrelu)(int n, const double* x, double* z);
  // dx += (x > 0) ? dy : 0
  void (*vrelu_bwd)(int n, const double* x, const double* dy, double* dx);
  // dx += (1 - y*y) * dy  (y = tanh(x))
  void (*vtanh_bwd)(int n, const double* y, const double* dy, double* dx);
  // x += c
  void (*vadd_scalar)(int n, double c, double* x);
  double (*vsum)(int n, const double* x);
  // y = A x, A row-major (m x n)
  void (*matvec)(int m, int n, const double* a, const double* x, double* y);
  // x += A^T y
  void (*matvec_t_acc)(int m, int n, const double* a, const double* y, double* x);
  // A += x y^T
  void (*ger_acc)(int m, int n, const double* x, const double* y, double* a);
  // fused Adam update; c1 = 1/(1-b1^t), c2 = 1/(1-b2^t)
  void (*adam)(int n, double* p, const double* g, double* m, double* v, double lr, double b1,
               double b2, double eps, double c1, double c2);
};

const Table& scalar_table();
// Active table; selected on first use (HF_KERNELS env var, else best for CPU).
const Table& active();
// Force a backend by name ("scalar", "avx2", "neon", "auto"). Returns false if
// the backend is unavailable on this machine.
bool set_backend(std::string_view name);
// All tables usable on this machine (for equivalence tests).
std::vector<const Table*> available_tables();

// Transcendental loops use libm in every backend so results are
// backend-independent; not part of the dispatch table.
inline void vtanh(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}
inline void vexp(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

}  // namespace hf::kernels
