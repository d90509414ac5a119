#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "tuplespec/errors.hpp"
#include "tuplespec/nn.hpp"

using namespace tuplespec;
using nn::Matrix;
using nn::Vector;

namespace {

constexpr double kH = 1e-5;
constexpr double kTol = 1e-6;

Matrix rand_matrix(int rows, int cols, std::mt19937_64& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Central-difference check of the input gradient dx against a scalar loss.
void check_input_grad(const std::function<double(const Matrix&)>& loss, const Matrix& x,
                      const Matrix& dx) {
  REQUIRE(dx.rows() == x.rows());
  REQUIRE(dx.cols() == x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      Matrix xp = x, xm = x;
      xp(i, j) += kH;
      xm(i, j) -= kH;
      double numeric = (loss(xp) - loss(xm)) / (2.0 * kH);
      CHECK(rel_err(numeric, dx(i, j)) < kTol);
    }
  }
}

// Central-difference check of every accumulated parameter gradient.
void check_param_grads(nn::ParamRegistry& reg, const std::function<double()>& loss) {
  for (const auto& p : reg.params()) {
    Matrix analytic = p->grad;
    for (int i = 0; i < analytic.rows(); ++i) {
      for (int j = 0; j < analytic.cols(); ++j) {
        double orig = p->value(i, j);
        p->value(i, j) = orig + kH;
        double lp = loss();
        p->value(i, j) = orig - kH;
        double lm = loss();
        p->value(i, j) = orig;
        double numeric = (lp - lm) / (2.0 * kH);
        CHECK_MESSAGE(rel_err(numeric, analytic(i, j)) < kTol, p->name);
      }
    }
  }
}

}  // namespace

TEST_CASE("gelu matches the exact-erf values") {
  Matrix x(1, 3);
  x << 0.0, 1.0, -1.0;
  Matrix y = nn::gelu(x);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(0, 1) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(y(0, 2) == doctest::Approx(-0.15865525393145705).epsilon(1e-12));
}

TEST_CASE("gelu and relu backward agree with finite differences") {
  std::mt19937_64 rng(11);
  Matrix x = rand_matrix(3, 4, rng);
  Matrix w = rand_matrix(3, 4, rng);
  auto gelu_loss = [&](const Matrix& xin) { return (nn::gelu(xin).array() * w.array()).sum(); };
  check_input_grad(gelu_loss, x, nn::gelu_backward(w, x));

  // Keep relu inputs away from the kink.
  Matrix xr = x.unaryExpr([](double v) { return std::abs(v) < 0.05 ? v + 0.1 : v; });
  auto relu_loss = [&](const Matrix& xin) { return (nn::relu(xin).array() * w.array()).sum(); };
  check_input_grad(relu_loss, xr, nn::relu_backward(w, xr));
}

TEST_CASE("softmax rows are normalized and shift invariant") {
  Matrix x(2, 2);
  x << 0.0, std::log(2.0), 1000.0, 1000.0 + std::log(2.0);
  Matrix y = nn::softmax_rows(x);
  for (int i = 0; i < 2; ++i) {
    CHECK(y.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y(i, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(y(i, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("linear layer gradcheck") {
  std::mt19937_64 rng(7);
  nn::ParamRegistry reg;
  nn::Linear lin;
  lin.init(reg, "lin", 3, 2);
  CHECK(reg.count_scalars() == 3 * 2 + 2);
  nn::init_normal(*lin.w, rng, 0.5);
  nn::init_normal(*lin.b, rng, 0.5);
  Matrix x = rand_matrix(4, 3, rng);
  Matrix w = rand_matrix(4, 2, rng);

  auto loss = [&](const Matrix& xin) {
    nn::LinearCache c;
    return (lin.forward(xin, c).array() * w.array()).sum();
  };
  nn::LinearCache cache;
  lin.forward(x, cache);
  reg.zero_grad();
  Matrix dx = lin.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg, [&] { return loss(x); });
}

TEST_CASE("layer norm forward oracle and gradcheck") {
  nn::ParamRegistry reg;
  nn::LayerNorm ln;
  ln.init(reg, "ln", 2);
  Matrix x0(1, 2);
  x0 << 1.0, 3.0;
  nn::LayerNormCache c0;
  Matrix y0 = ln.forward(x0, c0);
  CHECK(y0(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(y0(0, 1) == doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937_64 rng(13);
  nn::ParamRegistry reg4;
  nn::LayerNorm ln4;
  ln4.init(reg4, "ln4", 4);
  nn::init_normal(*ln4.gamma, rng, 0.3);
  nn::init_normal(*ln4.beta, rng, 0.3);
  Matrix x = rand_matrix(3, 4, rng);
  Matrix w = rand_matrix(3, 4, rng);
  auto loss = [&](const Matrix& xin) {
    nn::LayerNormCache c;
    return (ln4.forward(xin, c).array() * w.array()).sum();
  };
  nn::LayerNormCache cache;
  ln4.forward(x, cache);
  reg4.zero_grad();
  Matrix dx = ln4.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg4, [&] { return loss(x); });
}

TEST_CASE("multi-head attention gradcheck") {
  std::mt19937_64 rng(17);
  nn::ParamRegistry reg;
  nn::MultiHeadAttention attn;
  attn.init(reg, "attn", 4, 2);
  for (const auto& p : reg.params()) nn::init_normal(*p, rng, 0.4);
  Matrix x = rand_matrix(3, 4, rng);
  Matrix w = rand_matrix(3, 4, rng);
  auto loss = [&](const Matrix& xin) {
    nn::AttentionCache c;
    return (attn.forward(xin, c).array() * w.array()).sum();
  };
  nn::AttentionCache cache;
  attn.forward(x, cache);
  reg.zero_grad();
  Matrix dx = attn.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg, [&] { return loss(x); });
}

TEST_CASE("attention width must divide into heads") {
  nn::ParamRegistry reg;
  nn::MultiHeadAttention attn;
  CHECK_THROWS_AS(attn.init(reg, "attn", 6, 4), ConfigError);
}

TEST_CASE("feed forward gradcheck") {
  std::mt19937_64 rng(19);
  nn::ParamRegistry reg;
  nn::FeedForward ffn;
  ffn.init(reg, "ffn", 3, 5);
  for (const auto& p : reg.params()) nn::init_normal(*p, rng, 0.4);
  Matrix x = rand_matrix(2, 3, rng);
  Matrix w = rand_matrix(2, 3, rng);
  auto loss = [&](const Matrix& xin) {
    nn::FeedForwardCache c;
    return (ffn.forward(xin, c).array() * w.array()).sum();
  };
  nn::FeedForwardCache cache;
  ffn.forward(x, cache);
  reg.zero_grad();
  Matrix dx = ffn.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg, [&] { return loss(x); });
}

TEST_CASE("encoder layer gradcheck and post-norm invariant") {
  std::mt19937_64 rng(23);
  nn::ParamRegistry reg;
  nn::EncoderLayer layer;
  layer.init(reg, "enc", 4, 2, 8);
  for (const auto& p : reg.params()) {
    // Keep the norm parameters near their identity initialization.
    if (p->name.find(".gamma") != std::string::npos || p->name.find(".beta") != std::string::npos)
      continue;
    nn::init_normal(*p, rng, 0.3);
  }
  Matrix x = rand_matrix(2, 4, rng);
  Matrix w = rand_matrix(2, 4, rng);

  nn::EncoderLayerCache cache;
  Matrix y = layer.forward(x, cache);
  // Output rows are layer-normalized with gamma = 1, beta = 0.
  for (int i = 0; i < y.rows(); ++i) {
    CHECK(y.row(i).mean() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(y.row(i).squaredNorm() / y.cols() == doctest::Approx(1.0).epsilon(1e-6));
  }

  auto loss = [&](const Matrix& xin) {
    nn::EncoderLayerCache c;
    return (layer.forward(xin, c).array() * w.array()).sum();
  };
  reg.zero_grad();
  Matrix dx = layer.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg, [&] { return loss(x); });
}

TEST_CASE("attention pool gradcheck") {
  std::mt19937_64 rng(29);
  nn::ParamRegistry reg;
  nn::AttentionPool pool;
  pool.init(reg, "pool", 4);
  nn::init_normal(*pool.query, rng, 0.5);
  Matrix x = rand_matrix(3, 4, rng);
  Vector w = rand_matrix(4, 1, rng).col(0);

  auto loss = [&](const Matrix& xin) {
    nn::AttnPoolCache c;
    return pool.forward(xin, c).dot(w);
  };
  nn::AttnPoolCache cache;
  Vector pooled = pool.forward(x, cache);
  // Pooling weights are a convex combination, so the pooled vector stays in
  // the row span.
  CHECK(cache.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pooled.size() == 4);

  reg.zero_grad();
  Matrix dx = pool.backward(w, cache);
  check_input_grad(loss, x, dx);
  check_param_grads(reg, [&] { return loss(x); });
}

TEST_CASE("adam first step matches the closed form") {
  nn::ParamRegistry reg;
  auto& p = reg.create("p", 1, 2);
  p.value << 1.0, -3.0;
  p.grad << 2.0, -0.5;
  nn::AdamConfig cfg;
  cfg.lr = 0.1;
  reg.adam_step(cfg, 1);
  // After bias correction the first step is lr * g / (|g| + eps).
  CHECK(p.value(0, 0) == doctest::Approx(1.0 - 0.1 * (2.0 / (2.0 + 1e-8))).epsilon(1e-12));
  CHECK(p.value(0, 1) == doctest::Approx(-3.0 + 0.1 * (0.5 / (0.5 + 1e-8))).epsilon(1e-12));

  // A zero gradient leaves the parameter exactly in place on a fresh state.
  nn::ParamRegistry reg2;
  auto& q = reg2.create("q", 1, 1);
  q.value(0, 0) = 5.0;
  reg2.adam_step(cfg, 1);
  CHECK(q.value(0, 0) == 5.0);
}

TEST_CASE("parameter names must be unique") {
  nn::ParamRegistry reg;
  reg.create("p", 1, 1);
  CHECK_THROWS_AS(reg.create("p", 2, 2), RuntimeFailure);
}

TEST_CASE("weight serialization round trip and size validation") {
  std::mt19937_64 rng(31);
  nn::ParamRegistry a, b;
  for (auto* reg : {&a, &b}) {
    nn::Linear lin;
    lin.init(*reg, "lin", 3, 2);
    nn::LayerNorm ln;
    ln.init(*reg, "ln", 2);
  }
  for (const auto& p : a.params()) nn::init_normal(*p, rng, 1.0);

  std::ostringstream out;
  a.save_weights(out);
  std::string bytes = out.str();
  CHECK(bytes.size() == sizeof(double) * static_cast<size_t>(a.count_scalars()));

  std::istringstream in(bytes);
  b.load_weights(in);
  for (size_t i = 0; i < a.params().size(); ++i) {
    CHECK((a.params()[i]->value.array() == b.params()[i]->value.array()).all());
  }

  std::istringstream truncated(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(b.load_weights(truncated), DataError);

  std::istringstream padded(bytes + "x");
  CHECK_THROWS_AS(b.load_weights(padded), DataError);
}
