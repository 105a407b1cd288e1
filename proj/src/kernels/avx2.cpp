// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma on
// x86 targets only; the dispatcher never calls into it unless the CPU
// reports both features.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

#include "hf/kernels/kernels.hpp"

namespace hf::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double a_dot(int n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void a_axpy(int n, double a, const double* x, double* y) {
  __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void a_axpby(int n, double a, const double* x, double b, double* y) {
  __m256d av = _mm256_set1_pd(a);
  __m256d bv = _mm256_set1_pd(b);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void a_scale_add(int n, double a, double b, const double* x, double* y) {
  __m256d av = _mm256_set1_pd(a);
  __m256d bv = _mm256_set1_pd(b);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), bv));
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

void a_vadd(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

void a_vsub(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) z[i] = x[i] - y[i];
}

void a_vmul(int n, const double* x, const double* y, double* z) {
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void a_vfma3(int n, double c, const double* x, const double* y, double* z) {
  __m256d cv = _mm256_set1_pd(c);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(z + i, _mm256_fmadd_pd(cv, xy, _mm256_loadu_pd(z + i)));
  }
  for (; i < n; ++i) z[i] += c * x[i] * y[i];
}

void a_vrelu(int n, const double* x, double* z) {
  __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(z + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) z[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void a_vrelu_bwd(int n, const double* x, const double* dy, double* dx) {
  __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    __m256d gated = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), gated));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

void a_vtanh_bwd(int n, const double* y, const double* dy, double* dx) {
  __m256d one = _mm256_set1_pd(1.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    __m256d sech2 = _mm256_fnmadd_pd(yv, yv, one);  // 1 - y*y
    _mm256_storeu_pd(dx + i,
                     _mm256_fmadd_pd(sech2, _mm256_loadu_pd(dy + i), _mm256_loadu_pd(dx + i)));
  }
  for (; i < n; ++i) dx[i] += (1.0 - y[i] * y[i]) * dy[i];
}

void a_vadd_scalar(int n, double c, double* x) {
  __m256d cv = _mm256_set1_pd(c);
  int i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), cv));
  for (; i < n; ++i) x[i] += c;
}

double a_vsum(int n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void a_matvec(int m, int n, const double* a, const double* x, double* y) {
  int r = 0;
  // four rows share each load of x
  for (; r + 4 <= m; r += 4) {
    const double* a0 = a + static_cast<std::size_t>(r) * n;
    const double* a1 = a0 + n;
    const double* a2 = a1 + n;
    const double* a3 = a2 + n;
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) {
      __m256d xv = _mm256_loadu_pd(x + i);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + i), xv, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + i), xv, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + i), xv, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + i), xv, s3);
    }
    double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; i < n; ++i) {
      t0 += a0[i] * x[i];
      t1 += a1[i] * x[i];
      t2 += a2[i] * x[i];
      t3 += a3[i] * x[i];
    }
    y[r] = t0;
    y[r + 1] = t1;
    y[r + 2] = t2;
    y[r + 3] = t3;
  }
  for (; r < m; ++r) y[r] = a_dot(n, a + static_cast<std::size_t>(r) * n, x);
}

void a_matvec_t_acc(int m, int n, const double* a, const double* y, double* x) {
  for (int r = 0; r < m; ++r) a_axpy(n, y[r], a + static_cast<std::size_t>(r) * n, x);
}

void a_ger_acc(int m, int n, const double* x, const double* y, double* a) {
  for (int r = 0; r < m; ++r) a_axpy(n, x[r], y, a + static_cast<std::size_t>(r) * n);
}

void a_adam(int n, double* p, const double* g, double* m, double* v, double lr, double b1,
            double b2, double eps, double c1, double c2) {
  __m256d b1v = _mm256_set1_pd(b1), nb1 = _mm256_set1_pd(1.0 - b1);
  __m256d b2v = _mm256_set1_pd(b2), nb2 = _mm256_set1_pd(1.0 - b2);
  __m256d lrv = _mm256_set1_pd(lr), epsv = _mm256_set1_pd(eps);
  __m256d c1v = _mm256_set1_pd(c1), c2v = _mm256_set1_pd(c2);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gv = _mm256_loadu_pd(g + i);
    __m256d mv = _mm256_fmadd_pd(nb1, gv, _mm256_mul_pd(b1v, _mm256_loadu_pd(m + i)));
    __m256d g2 = _mm256_mul_pd(gv, gv);
    __m256d vv = _mm256_fmadd_pd(nb2, g2, _mm256_mul_pd(b2v, _mm256_loadu_pd(v + i)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    __m256d den = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vv, c2v)), epsv);
    __m256d num = _mm256_mul_pd(_mm256_mul_pd(mv, c1v), lrv);
    __m256d pv = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_div_pd(num, den));
    _mm256_storeu_pd(p + i, pv);
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace

const Table* avx2_table() {
  static const Table t{
      "avx2",     a_dot,       a_axpy,      a_axpby,        a_scale_add, a_vadd,
      a_vsub,     a_vmul,      a_vfma3,     a_vrelu,        a_vrelu_bwd, a_vtanh_bwd,
      a_vadd_scalar, a_vsum,   a_matvec,    a_matvec_t_acc, a_ger_acc,   a_adam,
  };
  return &t;
}

}  // namespace hf::kernels

#endif  // x86
