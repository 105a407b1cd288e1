// NEON variants (2-wide f64). Compiled on aarch64 targets only.

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

#include "hf/kernels/kernels.hpp"

namespace hf::kernels {
namespace {

double n_dot(int n, const double* x, const double* y) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void n_axpy(int n, double a, const double* x, double* y) {
  float64x2_t av = vdupq_n_f64(a);
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void n_axpby(int n, double a, const double* x, double b, double* y) {
  float64x2_t av = vdupq_n_f64(a);
  float64x2_t bv = vdupq_n_f64(b);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t t = vmulq_f64(bv, vld1q_f64(y + i));
    vst1q_f64(y + i, vfmaq_f64(t, av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void n_scale_add(int n, double a, double b, const double* x, double* y) {
  float64x2_t av = vdupq_n_f64(a);
  float64x2_t bv = vdupq_n_f64(b);
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(bv, av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

void n_vadd(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vaddq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

void n_vsub(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) z[i] = x[i] - y[i];
}

void n_vmul(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void n_vfma3(int n, double c, const double* x, const double* y, double* z) {
  float64x2_t cv = vdupq_n_f64(c);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t xy = vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    vst1q_f64(z + i, vfmaq_f64(vld1q_f64(z + i), cv, xy));
  }
  for (; i < n; ++i) z[i] += c * x[i] * y[i];
}

void n_vrelu(int n, const double* x, double* z) {
  float64x2_t zero = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; ++i) z[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void n_vrelu_bwd(int n, const double* x, const double* dy, double* dx) {
  float64x2_t zero = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t mask = vcgtq_f64(vld1q_f64(x + i), zero);
    float64x2_t gated =
        vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vld1q_f64(dy + i))));
    vst1q_f64(dx + i, vaddq_f64(vld1q_f64(dx + i), gated));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

void n_vtanh_bwd(int n, const double* y, const double* dy, double* dx) {
  float64x2_t one = vdupq_n_f64(1.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    float64x2_t sech2 = vfmsq_f64(one, yv, yv);
    vst1q_f64(dx + i, vfmaq_f64(vld1q_f64(dx + i), sech2, vld1q_f64(dy + i)));
  }
  for (; i < n; ++i) dx[i] += (1.0 - y[i] * y[i]) * dy[i];
}

void n_vadd_scalar(int n, double c, double* x) {
  float64x2_t cv = vdupq_n_f64(c);
  int i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vaddq_f64(vld1q_f64(x + i), cv));
  for (; i < n; ++i) x[i] += c;
}

double n_vsum(int n, const double* x) {
  float64x2_t acc = vdupq_n_f64(0.0);
  int i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void n_matvec(int m, int n, const double* a, const double* x, double* y) {
  for (int r = 0; r < m; ++r) y[r] = n_dot(n, a + static_cast<std::size_t>(r) * n, x);
}

void n_matvec_t_acc(int m, int n, const double* a, const double* y, double* x) {
  for (int r = 0; r < m; ++r) n_axpy(n, y[r], a + static_cast<std::size_t>(r) * n, x);
}

void n_ger_acc(int m, int n, const double* x, const double* y, double* a) {
  for (int r = 0; r < m; ++r) n_axpy(n, x[r], y, a + static_cast<std::size_t>(r) * n);
}

void n_adam(int n, double* p, const double* g, double* m, double* v, double lr, double b1,
            double b2, double eps, double c1, double c2) {
  for (int i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace

const Table* neon_table() {
  static const Table t{
      "neon",     n_dot,       n_axpy,      n_axpby,        n_scale_add, n_vadd,
      n_vsub,     n_vmul,      n_vfma3,     n_vrelu,        n_vrelu_bwd, n_vtanh_bwd,
      n_vadd_scalar, n_vsum,   n_matvec,    n_matvec_t_acc, n_ger_acc,   n_adam,
  };
  return &t;
}

}  // namespace hf::kernels

#endif  // aarch64
