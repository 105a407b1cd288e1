#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hf/common/rng.hpp"
#include "hf/kernels/kernels.hpp"
#include "testutil.hpp"

using hf::Rng;
using hf::kernels::Table;
using hf::test::random_vec;

namespace {

// Sizes chosen to exercise SIMD main loops and every remainder length.
const std::vector<int> kSizes = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 256};

double naive_dot(const std::vector<double>& x, const std::vector<double>& y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

}  // namespace

TEST_CASE("scalar table present and named") {
  const Table& s = hf::kernels::scalar_table();
  CHECK(std::string(s.name) == "scalar");
  auto tables = hf::kernels::available_tables();
  CHECK(!tables.empty());
  bool has_scalar = false;
  for (const Table* t : tables)
    if (std::string(t->name) == "scalar") has_scalar = true;
  CHECK(has_scalar);
}

TEST_CASE("set_backend") {
  CHECK(hf::kernels::set_backend("scalar"));
  CHECK(std::string(hf::kernels::active().name) == "scalar");
  CHECK_FALSE(hf::kernels::set_backend("no-such-backend"));
  CHECK(hf::kernels::set_backend("auto"));
}

TEST_CASE("scalar kernels match independent oracles") {
  const Table& k = hf::kernels::scalar_table();
  Rng rng(7);
  for (int n : kSizes) {
    auto x = random_vec(rng, n), y = random_vec(rng, n), z = random_vec(rng, n);

    CHECK(k.dot(n, x.data(), y.data()) == doctest::Approx(naive_dot(x, y)).epsilon(1e-13));

    auto y2 = y;
    k.axpy(n, 2.5, x.data(), y2.data());
    for (int i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y[i] + 2.5 * x[i]));

    y2 = y;
    k.axpby(n, 1.5, x.data(), -0.5, y2.data());
    for (int i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(1.5 * x[i] - 0.5 * y[i]));

    std::vector<double> out(n);
    k.scale_add(n, 3.0, -1.0, x.data(), out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(3.0 * x[i] - 1.0));

    k.vadd(n, x.data(), y.data(), out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == x[i] + y[i]);
    k.vsub(n, x.data(), y.data(), out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == x[i] - y[i]);
    k.vmul(n, x.data(), y.data(), out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == x[i] * y[i]);

    auto z2 = z;
    k.vfma3(n, 2.0, x.data(), y.data(), z2.data());
    for (int i = 0; i < n; ++i) CHECK(z2[i] == doctest::Approx(z[i] + 2.0 * x[i] * y[i]));

    k.vrelu(n, x.data(), out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == std::max(x[i], 0.0));

    auto dx = random_vec(rng, n);
    auto dx2 = dx;
    k.vrelu_bwd(n, x.data(), y.data(), dx2.data());
    for (int i = 0; i < n; ++i) CHECK(dx2[i] == dx[i] + (x[i] > 0.0 ? y[i] : 0.0));

    dx2 = dx;
    k.vtanh_bwd(n, x.data(), y.data(), dx2.data());
    for (int i = 0; i < n; ++i)
      CHECK(dx2[i] == doctest::Approx(dx[i] + (1.0 - x[i] * x[i]) * y[i]));

    auto x2 = x;
    k.vadd_scalar(n, 0.75, x2.data());
    for (int i = 0; i < n; ++i) CHECK(x2[i] == x[i] + 0.75);

    CHECK(k.vsum(n, x.data()) ==
          doctest::Approx(std::accumulate(x.begin(), x.end(), 0.0)).epsilon(1e-13));
  }
}

TEST_CASE("scalar matvec family matches naive loops") {
  const Table& k = hf::kernels::scalar_table();
  Rng rng(11);
  for (int m : {1, 2, 3, 5, 8, 13}) {
    for (int n : {1, 2, 4, 7, 16, 33}) {
      auto a = random_vec(rng, static_cast<std::size_t>(m) * n);
      auto x = random_vec(rng, n);
      auto y = random_vec(rng, m);

      std::vector<double> out(m);
      k.matvec(m, n, a.data(), x.data(), out.data());
      for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(i) * n + j] * x[j];
        CHECK(out[i] == doctest::Approx(acc).epsilon(1e-13));
      }

      auto xt = x;
      k.matvec_t_acc(m, n, a.data(), y.data(), xt.data());
      for (int j = 0; j < n; ++j) {
        double acc = x[j];
        for (int i = 0; i < m; ++i) acc += a[static_cast<std::size_t>(i) * n + j] * y[i];
        CHECK(xt[j] == doctest::Approx(acc).epsilon(1e-13));
      }

      auto a2 = a;
      k.ger_acc(m, n, y.data(), x.data(), a2.data());
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          CHECK(a2[static_cast<std::size_t>(i) * n + j] ==
                doctest::Approx(a[static_cast<std::size_t>(i) * n + j] + y[i] * x[j]));
    }
  }
}

TEST_CASE("adam kernel matches formula") {
  const Table& k = hf::kernels::scalar_table();
  Rng rng(3);
  int n = 9;
  auto p = random_vec(rng, n), g = random_vec(rng, n), m = random_vec(rng, n, 0.0, 0.5),
       v = random_vec(rng, n, 0.0, 0.5);
  double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  int t = 7;
  double c1 = 1.0 / (1.0 - std::pow(b1, t)), c2 = 1.0 / (1.0 - std::pow(b2, t));

  auto p2 = p, m2 = m, v2 = v;
  k.adam(n, p2.data(), g.data(), m2.data(), v2.data(), lr, b1, b2, eps, c1, c2);
  for (int i = 0; i < n; ++i) {
    double mi = b1 * m[i] + (1.0 - b1) * g[i];
    double vi = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    double step = lr * (mi * c1) / (std::sqrt(vi * c2) + eps);
    CHECK(m2[i] == doctest::Approx(mi).epsilon(1e-15));
    CHECK(v2[i] == doctest::Approx(vi).epsilon(1e-15));
    CHECK(p2[i] == doctest::Approx(p[i] - step).epsilon(1e-14));
  }
}

TEST_CASE("all available backends agree with scalar") {
  const Table& s = hf::kernels::scalar_table();
  Rng rng(19);
  for (const Table* t : hf::kernels::available_tables()) {
    if (t == &s) continue;
    INFO("backend: ", t->name);
    for (int n : kSizes) {
      auto x = random_vec(rng, n), y = random_vec(rng, n), z = random_vec(rng, n);

      CHECK(hf::test::rel_err(t->dot(n, x.data(), y.data()), s.dot(n, x.data(), y.data())) <
            1e-13);
      CHECK(hf::test::rel_err(t->vsum(n, x.data()), s.vsum(n, x.data())) < 1e-13);

      auto a1 = y, a2 = y;
      t->axpy(n, 1.3, x.data(), a1.data());
      s.axpy(n, 1.3, x.data(), a2.data());
      for (int i = 0; i < n; ++i) CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-15));

      a1 = y, a2 = y;
      t->axpby(n, -0.2, x.data(), 0.9, a1.data());
      s.axpby(n, -0.2, x.data(), 0.9, a2.data());
      for (int i = 0; i < n; ++i) CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-15));

      std::vector<double> o1(n), o2(n);
      t->scale_add(n, 2.0, 0.3, x.data(), o1.data());
      s.scale_add(n, 2.0, 0.3, x.data(), o2.data());
      for (int i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-15));
      t->vadd(n, x.data(), y.data(), o1.data());
      s.vadd(n, x.data(), y.data(), o2.data());
      CHECK(o1 == o2);
      t->vsub(n, x.data(), y.data(), o1.data());
      s.vsub(n, x.data(), y.data(), o2.data());
      CHECK(o1 == o2);
      t->vmul(n, x.data(), y.data(), o1.data());
      s.vmul(n, x.data(), y.data(), o2.data());
      CHECK(o1 == o2);

      auto f1 = z, f2 = z;
      t->vfma3(n, -1.7, x.data(), y.data(), f1.data());
      s.vfma3(n, -1.7, x.data(), y.data(), f2.data());
      for (int i = 0; i < n; ++i) CHECK(f1[i] == doctest::Approx(f2[i]).epsilon(1e-15));

      t->vrelu(n, x.data(), o1.data());
      s.vrelu(n, x.data(), o2.data());
      CHECK(o1 == o2);

      auto d1 = z, d2 = z;
      t->vrelu_bwd(n, x.data(), y.data(), d1.data());
      s.vrelu_bwd(n, x.data(), y.data(), d2.data());
      CHECK(d1 == d2);

      d1 = z, d2 = z;
      t->vtanh_bwd(n, x.data(), y.data(), d1.data());
      s.vtanh_bwd(n, x.data(), y.data(), d2.data());
      for (int i = 0; i < n; ++i) CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-15));

      auto s1 = x, s2 = x;
      t->vadd_scalar(n, -0.4, s1.data());
      s.vadd_scalar(n, -0.4, s2.data());
      CHECK(s1 == s2);
    }

    for (int m : {1, 3, 8, 13}) {
      for (int n : {1, 5, 16, 33}) {
        auto a = random_vec(rng, static_cast<std::size_t>(m) * n);
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, m);
        std::vector<double> o1(m), o2(m);
        t->matvec(m, n, a.data(), x.data(), o1.data());
        s.matvec(m, n, a.data(), x.data(), o2.data());
        for (int i = 0; i < m; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-13));

        auto x1 = x, x2 = x;
        t->matvec_t_acc(m, n, a.data(), y.data(), x1.data());
        s.matvec_t_acc(m, n, a.data(), y.data(), x2.data());
        for (int j = 0; j < n; ++j) CHECK(x1[j] == doctest::Approx(x2[j]).epsilon(1e-13));

        auto g1 = a, g2 = a;
        t->ger_acc(m, n, y.data(), x.data(), g1.data());
        s.ger_acc(m, n, y.data(), x.data(), g2.data());
        for (std::size_t i = 0; i < g1.size(); ++i)
          CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-15));
      }
    }

    for (int n : kSizes) {
      auto p = random_vec(rng, n), g = random_vec(rng, n);
      auto m = random_vec(rng, n, 0.0, 0.5), v = random_vec(rng, n, 0.0, 0.5);
      auto p1 = p, m1 = m, v1 = v, p2 = p, m2 = m, v2 = v;
      double c1 = 1.0 / (1.0 - std::pow(0.9, 5)), c2 = 1.0 / (1.0 - std::pow(0.999, 5));
      t->adam(n, p1.data(), g.data(), m1.data(), v1.data(), 1e-3, 0.9, 0.999, 1e-8, c1, c2);
      s.adam(n, p2.data(), g.data(), m2.data(), v2.data(), 1e-3, 0.9, 0.999, 1e-8, c1, c2);
      for (int i = 0; i < n; ++i) {
        CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-14));
        CHECK(m1[i] == doctest::Approx(m2[i]).epsilon(1e-14));
        CHECK(v1[i] == doctest::Approx(v2[i]).epsilon(1e-14));
      }
    }
  }
}
