#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "hf/common/error.hpp"
#include "hf/common/rng.hpp"
#include "hf/num/adam.hpp"
#include "hf/num/checkpoint.hpp"
#include "hf/num/mlp.hpp"
#include "hf/num/tape.hpp"
#include "testutil.hpp"

using hf::Rng;
using hf::num::MlpParams;
using hf::num::NodeId;
using hf::num::OutputActivation;
using hf::num::Tape;
using hf::test::fd_gradient;
using hf::test::random_vec;
using hf::test::rel_err;

namespace {

// Plain std::vector re-implementation of the forward pass, used as the oracle
// for both mlp_forward and mlp_apply.
std::vector<double> naive_forward(const MlpParams& p, std::vector<double> x) {
  for (int l = 0; l < p.num_layers(); ++l) {
    int in = p.layer_sizes[l], out = p.layer_sizes[l + 1];
    auto w = p.weight(l);
    auto b = p.bias(l);
    std::vector<double> y(out);
    for (int i = 0; i < out; ++i) {
      double acc = b[i];
      for (int j = 0; j < in; ++j) acc += w[static_cast<std::size_t>(i) * in + j] * x[j];
      y[i] = acc;
    }
    bool last = l == p.num_layers() - 1;
    if (!last || p.output == OutputActivation::Tanh)
      for (double& v : y) v = std::tanh(v);
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("square gradient at x=3") {
  auto [val, grad] = hf::num::value_and_grad(std::vector<double>{3.0}, [](Tape& t, NodeId x) {
    return t.sum(t.square(x));
  });
  CHECK(val == doctest::Approx(9.0));
  CHECK(grad[0] == doctest::Approx(6.0));
}

TEST_CASE("constant function has zero gradient") {
  auto [val, grad] = hf::num::value_and_grad(std::vector<double>{1.0, -2.0}, [](Tape& t, NodeId x) {
    (void)x;
    return t.constant_scalar(4.5);
  });
  CHECK(val == 4.5);
  CHECK(grad[0] == 0.0);
  CHECK(grad[1] == 0.0);
}

TEST_CASE("per-op gradients match central differences at random points") {
  Rng rng(101);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + rng.uniform_int(5);
    // keep away from the relu kink and reciprocal pole
    std::vector<double> at(n);
    for (double& v : at) {
      v = rng.uniform(0.2, 1.8);
      if (rng.uniform() < 0.5) v = -v;
    }
    int which = rep % 10;
    auto build = [&](Tape& t, NodeId x) -> NodeId {
      switch (which) {
        case 0: return t.sum(t.add(x, t.square(x)));
        case 1: return t.sum(t.sub(t.exp(x), x));
        case 2: return t.sum(t.mul(x, t.tanh(x)));
        case 3: return t.sum(t.affine(x, -2.5, 0.75));
        case 4: return t.sum(t.reciprocal(t.affine(t.square(x), 1.0, 0.5)));
        case 5: return t.sum(t.relu(x));
        case 6: return t.mean(t.square(x));
        case 7: {
          NodeId a = t.slice(x, 0, 1);
          NodeId b = t.slice(x, n - 1, 1);
          return t.sum(t.mul(t.concat(a, b), t.concat(b, a)));
        }
        case 8: return t.sum(t.square(t.tanh(t.affine(x, 0.7, -0.1))));
        default: return t.sum(t.exp(t.affine(t.mul(x, x), -0.5, 0.0)));
      }
    };
    auto [val, grad] = hf::num::value_and_grad(at, build);
    auto fd = fd_gradient(
        [&](const std::vector<double>& p) {
          return hf::num::value_and_grad(p, build).first;
        },
        at);
    for (int i = 0; i < n; ++i) {
      CHECK(rel_err(grad[i], fd[i]) < 1e-4);
      ++checked;
    }
    CHECK(std::isfinite(val));
  }
  CHECK(checked > 200);
}

TEST_CASE("gradient accumulates when a node fans out") {
  // f(x) = x*x + x  => f' = 2x + 1, with x feeding two consumers
  auto [val, grad] = hf::num::value_and_grad(std::vector<double>{1.5}, [](Tape& t, NodeId x) {
    return t.sum(t.add(t.mul(x, x), x));
  });
  CHECK(val == doctest::Approx(1.5 * 1.5 + 1.5));
  CHECK(grad[0] == doctest::Approx(4.0));
}

TEST_CASE("linear op forward and gradient") {
  Rng rng(55);
  int out = 3, in = 4;
  auto wv = random_vec(rng, static_cast<std::size_t>(out) * in);
  auto bv = random_vec(rng, out);
  auto xv = random_vec(rng, in);

  Tape t;
  NodeId w = t.leaf(out, in, true);
  NodeId b = t.leaf(1, out, true);
  NodeId x = t.leaf(1, in, true);
  t.set_leaf(w, wv);
  t.set_leaf(b, bv);
  t.set_leaf(x, xv);
  NodeId y = t.linear(w, x, b);
  NodeId loss = t.sum(t.square(y));
  t.forward();
  t.backward(loss);

  auto yv = t.value(y);
  for (int i = 0; i < out; ++i) {
    double acc = bv[i];
    for (int j = 0; j < in; ++j) acc += wv[static_cast<std::size_t>(i) * in + j] * xv[j];
    CHECK(yv[i] == doctest::Approx(acc).epsilon(1e-14));
  }

  // FD on every parameter bundle component
  auto eval = [&](const std::vector<double>& wflat, const std::vector<double>& bflat,
                  const std::vector<double>& xflat) {
    double acc = 0.0;
    for (int i = 0; i < out; ++i) {
      double yi = bflat[i];
      for (int j = 0; j < in; ++j) yi += wflat[static_cast<std::size_t>(i) * in + j] * xflat[j];
      acc += yi * yi;
    }
    return acc;
  };
  auto gw = t.grad(w);
  auto fdw = fd_gradient([&](const std::vector<double>& p) { return eval(p, bv, xv); }, wv);
  for (std::size_t i = 0; i < wv.size(); ++i) CHECK(rel_err(gw[i], fdw[i]) < 1e-4);
  auto gb = t.grad(b);
  auto fdb = fd_gradient([&](const std::vector<double>& p) { return eval(wv, p, xv); }, bv);
  for (std::size_t i = 0; i < bv.size(); ++i) CHECK(rel_err(gb[i], fdb[i]) < 1e-4);
  auto gx = t.grad(x);
  auto fdx = fd_gradient([&](const std::vector<double>& p) { return eval(wv, bv, p); }, xv);
  for (std::size_t i = 0; i < xv.size(); ++i) CHECK(rel_err(gx[i], fdx[i]) < 1e-4);
}

TEST_CASE("build once, re-evaluate at new leaf values") {
  Tape t;
  NodeId x = t.leaf(1, 2, true);
  NodeId root = t.sum(t.mul(x, t.exp(x)));
  auto eval_fresh = [&](std::vector<double> v) {
    return v[0] * std::exp(v[0]) + v[1] * std::exp(v[1]);
  };
  for (auto v : {std::vector<double>{0.3, -0.7}, {1.2, 0.0}, {-2.0, 2.0}}) {
    t.set_leaf(x, v);
    t.forward();
    CHECK(t.scalar(root) == doctest::Approx(eval_fresh(v)).epsilon(1e-14));
  }
}

TEST_CASE("leaf views see external parameter updates") {
  std::vector<double> storage = {1.0, 2.0};
  Tape t;
  NodeId x = t.leaf_view(storage.data(), 1, 2, true);
  NodeId root = t.sum(t.square(x));
  t.forward();
  CHECK(t.scalar(root) == doctest::Approx(5.0));
  storage[0] = 3.0;
  t.forward();
  CHECK(t.scalar(root) == doctest::Approx(13.0));
  t.backward(root);
  CHECK(t.grad(x)[0] == doctest::Approx(6.0));
}

TEST_CASE("const leaves receive no gradient and shape errors throw") {
  Tape t;
  std::vector<double> cv = {2.0};
  NodeId c = t.leaf_view(static_cast<const double*>(cv.data()), 1, 1);
  NodeId x = t.leaf(1, 1, true);
  t.set_leaf(x, std::vector<double>{4.0});
  NodeId root = t.sum(t.mul(c, x));
  t.forward();
  t.backward(root);
  CHECK(t.grad(x)[0] == doctest::Approx(2.0));
  CHECK_FALSE(t.requires_grad(c));

  NodeId bad = t.leaf(1, 3, true);
  CHECK_THROWS_AS((void)t.add(x, bad), hf::ShapeError);
}

TEST_CASE("backward on non-scalar root is rejected") {
  Tape t;
  NodeId x = t.leaf(1, 3, true);
  t.set_leaf(x, std::vector<double>{1.0, 2.0, 3.0});
  NodeId y = t.square(x);
  t.forward();
  CHECK_THROWS_AS(t.backward(y), hf::Error);
}

TEST_CASE("mlp_init determinism and shape") {
  auto a = hf::num::mlp_init({3, 8, 8, 1}, 42);
  auto b = hf::num::mlp_init({3, 8, 8, 1}, 42);
  CHECK(a.flat == b.flat);
  CHECK(a.flat.size() == 3 * 8 + 8 + 8 * 8 + 8 + 8 * 1 + 1);
  CHECK(MlpParams::param_count({3, 8, 8, 1}) == 113);

  auto c = hf::num::mlp_init({3, 8, 8, 1}, 43);
  CHECK(a.flat != c.flat);

  // Glorot bound and zero biases
  for (int l = 0; l < a.num_layers(); ++l) {
    int in = a.layer_sizes[l], out = a.layer_sizes[l + 1];
    double bound = std::sqrt(6.0 / (in + out));
    for (double w : a.weight(l)) {
      CHECK(w <= bound);
      CHECK(w >= -bound);
    }
    for (double bias : a.bias(l)) CHECK(bias == 0.0);
  }

  CHECK_THROWS_AS(hf::num::mlp_init({}, 1), hf::ConfigError);
  CHECK_THROWS_AS(hf::num::mlp_init({3}, 1), hf::ConfigError);
  CHECK_THROWS_AS(hf::num::mlp_init({3, 0, 1}, 1), hf::ConfigError);
}

TEST_CASE("mlp_forward identity and constant nets") {
  MlpParams p;
  p.layer_sizes = {2, 2};
  p.flat.assign(MlpParams::param_count(p.layer_sizes), 0.0);
  auto w = p.weight(0);
  w[0] = 1.0;
  w[3] = 1.0;
  auto out = hf::num::mlp_forward(p, std::vector<double>{0.3, -0.9});
  CHECK(out.data[0] == doctest::Approx(0.3));
  CHECK(out.data[1] == doctest::Approx(-0.9));

  // zero hidden weights: output = second-layer bias
  MlpParams q = hf::num::mlp_init({3, 4, 2}, 9);
  std::fill(q.flat.begin(), q.flat.end(), 0.0);
  q.bias(1)[0] = 0.25;
  q.bias(1)[1] = -1.5;
  auto out2 = hf::num::mlp_forward(q, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(out2.data[0] == doctest::Approx(0.25));
  CHECK(out2.data[1] == doctest::Approx(-1.5));
}

TEST_CASE("mlp_forward matches naive oracle") {
  Rng rng(77);
  for (auto output : {OutputActivation::Identity, OutputActivation::Tanh}) {
    auto p = hf::num::mlp_init({5, 16, 8, 3}, 1234, output);
    for (int rep = 0; rep < 20; ++rep) {
      auto x = random_vec(rng, 5, -2.0, 2.0);
      auto got = hf::num::mlp_forward(p, x);
      auto want = naive_forward(p, x);
      REQUIRE(got.data.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mlp_forward repeated calls bit-identical") {
  auto p = hf::num::mlp_init({4, 8, 2}, 5);
  std::vector<double> x = {0.1, -0.2, 0.3, -0.4};
  auto a = hf::num::mlp_forward(p, x);
  auto b = hf::num::mlp_forward(p, x);
  CHECK(a.data == b.data);
}

TEST_CASE("BatchMlpEval matches mlp_forward") {
  Rng rng(13);
  auto p = hf::num::mlp_init({4, 12, 3}, 99, OutputActivation::Tanh);
  hf::num::BatchMlpEval ev(&p, 8);
  std::vector<double> xs = random_vec(rng, 4 * 6, -1.5, 1.5);
  auto out = ev.run(xs.data(), 6);
  REQUIRE(out.size() == 3 * 6);
  for (int r = 0; r < 6; ++r) {
    auto single = hf::num::mlp_forward(p, std::span<const double>(xs.data() + 4 * r, 4));
    for (int c = 0; c < 3; ++c)
      CHECK(out[static_cast<std::size_t>(r) * 3 + c] ==
            doctest::Approx(single.data[c]).epsilon(1e-14));
  }
}

TEST_CASE("mlp_apply matches mlp_forward and its gradient passes FD") {
  Rng rng(31);
  auto p = hf::num::mlp_init({3, 8, 2}, 7, OutputActivation::Tanh);
  auto x0 = random_vec(rng, 3, -1.0, 1.0);

  Tape t;
  auto net = hf::num::attach_mlp(t, p, true);
  NodeId x = t.leaf(1, 3, true);
  t.set_leaf(x, x0);
  NodeId y = hf::num::mlp_apply(t, net, x);
  NodeId loss = t.sum(t.square(y));
  t.forward();

  auto want = hf::num::mlp_forward(p, x0);
  auto got = t.value(y);
  for (std::size_t i = 0; i < want.data.size(); ++i)
    CHECK(got[i] == doctest::Approx(want.data[i]).epsilon(1e-12));

  t.backward(loss);
  // gradient wrt every mlp parameter via FD on the flat bundle
  auto loss_at = [&](const std::vector<double>& flat) {
    MlpParams q = p;
    q.flat = flat;
    auto out = hf::num::mlp_forward(q, x0);
    double acc = 0.0;
    for (double v : out.data) acc += v * v;
    return acc;
  };
  auto fd = fd_gradient(loss_at, p.flat);
  std::size_t idx = 0;
  for (int l = 0; l < p.num_layers(); ++l) {
    auto gw = t.grad(net.w[l]);
    for (std::size_t i = 0; i < gw.size(); ++i, ++idx) CHECK(rel_err(gw[i], fd[idx]) < 1e-4);
    auto gb = t.grad(net.b[l]);
    for (std::size_t i = 0; i < gb.size(); ++i, ++idx) CHECK(rel_err(gb[i], fd[idx]) < 1e-4);
  }
  CHECK(idx == p.flat.size());
}

TEST_CASE("const-attached mlp sees parameter updates without gradients") {
  auto p = hf::num::mlp_init({2, 4, 1}, 3);
  Tape t;
  auto net = hf::num::attach_mlp(t, std::as_const(p));
  NodeId x = t.leaf(1, 2, true);
  t.set_leaf(x, std::vector<double>{0.5, -0.5});
  NodeId y = hf::num::mlp_apply(t, net, x);
  NodeId root = t.sum(y);
  t.forward();
  double before = t.scalar(root);
  CHECK_FALSE(t.requires_grad(net.w[0]));
  t.backward(root);  // must not touch const leaves

  for (double& v : p.flat) v += 0.1;
  t.forward();
  double after = t.scalar(root);
  CHECK(before != after);
  auto want = hf::num::mlp_forward(p, std::vector<double>{0.5, -0.5});
  CHECK(after == doctest::Approx(want.data[0]).epsilon(1e-12));
}

TEST_CASE("adam zero gradient is identity on params for any state") {
  Rng rng(21);
  auto params = random_vec(rng, 6);
  auto before = params;
  hf::num::AdamState st(6, 0.05);
  st.m = random_vec(rng, 6);
  st.v = random_vec(rng, 6, 0.0, 1.0);
  st.t = 17;
  std::vector<double> zeros(6, 0.0);
  hf::num::adam_step(params, zeros, st);
  CHECK(params == before);
  CHECK(st.t == 18);
}

TEST_CASE("adam decreases a quadratic and converges") {
  std::vector<double> x = {1.0};
  hf::num::AdamState st(1, 0.1);
  double prev = x[0] * x[0];
  for (int i = 0; i < 2; ++i) {
    std::vector<double> g = {2.0 * x[0]};
    hf::num::adam_step(x, g, st);
  }
  CHECK(x[0] * x[0] < prev);

  x = {1.0};
  st = hf::num::AdamState(1, 0.1);
  for (int i = 0; i < 500 && std::abs(x[0]) >= 1e-3; ++i) {
    std::vector<double> g = {2.0 * x[0]};
    hf::num::adam_step(x, g, st);
  }
  CHECK(std::abs(x[0]) < 1e-3);
}

TEST_CASE("adam rejects non-finite gradients and shape mismatch") {
  std::vector<double> x = {1.0, 2.0};
  hf::num::AdamState st(2);
  std::vector<double> g = {0.1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(hf::num::adam_step(x, g, st), hf::NumericalError);
  std::vector<double> g3 = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(hf::num::adam_step(x, g3, st), hf::ShapeError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  hf::test::TempDir dir("ckpt");
  auto p = hf::num::mlp_init({4, 16, 16, 2}, 2024, OutputActivation::Tanh);
  nlohmann::json meta;
  meta["seed"] = 2024;
  meta["note"] = "round-trip";
  auto path = dir.path / "net.bin";
  hf::num::save_mlp(path, p, meta);

  nlohmann::json meta2;
  auto q = hf::num::load_mlp(path, &meta2);
  CHECK(q.layer_sizes == p.layer_sizes);
  CHECK(q.output == p.output);
  CHECK(q.flat == p.flat);
  CHECK(meta2["seed"] == 2024);
  CHECK(meta2["note"] == "round-trip");
  CHECK(meta2["layer_sizes"].get<std::vector<int>>() == p.layer_sizes);

  // identical bytes when saved twice
  hf::num::save_mlp(dir.path / "net2.bin", p, meta);
  auto read_all = [](const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(read_all(path) == read_all(dir.path / "net2.bin"));
}

TEST_CASE("checkpoint validation errors") {
  hf::test::TempDir dir("ckpt_bad");
  auto p = hf::num::mlp_init({2, 3, 1}, 7);
  auto path = dir.path / "net.bin";
  hf::num::save_mlp(path, p, {});

  CHECK_THROWS_AS(hf::num::load_mlp(dir.path / "missing.bin"), hf::Error);

  {
    std::ofstream out(dir.path / "magic.bin", std::ios::binary);
    out << "XXXX";
  }
  CHECK_THROWS_AS(hf::num::load_mlp(dir.path / "magic.bin"), hf::Error);

  // truncate after header
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes(std::istreambuf_iterator<char>(in), {});
    std::ofstream out(dir.path / "trunc.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 9));
  }
  CHECK_THROWS_AS(hf::num::load_mlp(dir.path / "trunc.bin"), hf::Error);
}
