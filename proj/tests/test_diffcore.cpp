#include <cmath>
#include <vector>

#include "doctest.h"
#include "provq/adam.hpp"
#include "provq/errors.hpp"
#include "provq/mlp.hpp"
#include "provq/rng.hpp"
#include "provq/tape.hpp"
#include "provq/tensor.hpp"
#include "support/testutil.hpp"

using namespace provq;

TEST_CASE("matmul_add identity and zero-weight cases") {
  Tape tape;
  const Tensor x = Tensor::matrix(1, 2, {1.0, 0.0});
  const Tensor eye = Tensor::matrix(2, 2, {1.0, 0.0, 0.0, 1.0});
  const Tensor zero_bias = Tensor::zeros({2});
  const Tensor y = tape.matmul_add(x, eye, zero_bias);
  CHECK(y.values() == std::vector<double>{1.0, 0.0});

  const Tensor x2 = Tensor::matrix(1, 2, {1.0, 2.0});
  const Tensor zeros = Tensor::zeros({2, 2});
  const Tensor bias = Tensor::vector({3.0, 4.0});
  const Tensor y2 = tape.matmul_add(x2, zeros, bias);
  CHECK(y2.values() == std::vector<double>{3.0, 4.0});
}

TEST_CASE("matmul_add gradient of sum w.r.t. weights") {
  const Tensor x = Tensor::matrix(1, 2, {1.0, 2.0});
  const Tensor w = Tensor::matrix(2, 2, {0.5, -0.3, 0.8, 0.1}, true);
  const Tensor b = Tensor::vector({0.2, -0.1}, true);

  auto forward = [&]() {
    Tape tape;
    return tape.sum(tape.matmul_add(x, w, b)).item();
  };

  Tape tape;
  const Tensor loss = tape.sum(tape.matmul_add(x, w, b));
  tape.backward(loss);

  // d(sum)/dW = input broadcast over columns.
  CHECK(w.grad() == std::vector<double>{1.0, 1.0, 2.0, 2.0});
  CHECK(b.grad() == std::vector<double>{1.0, 1.0});
  CHECK(testutil::max_rel_err(w.grad(), testutil::finite_diff(w, forward)) <
        1e-4);
  CHECK(testutil::max_rel_err(b.grad(), testutil::finite_diff(b, forward)) <
        1e-4);
}

TEST_CASE("matmul_add names the offending operand") {
  Tape tape;
  const Tensor x = Tensor::matrix(1, 3, {1.0, 2.0, 3.0});
  const Tensor w = Tensor::matrix(2, 2, {1.0, 0.0, 0.0, 1.0});
  const Tensor b = Tensor::zeros({2});
  CHECK_THROWS_WITH_AS(tape.matmul_add(x, w, b),
                       doctest::Contains("weights"), DimensionError);

  const Tensor x2 = Tensor::matrix(1, 2, {1.0, 2.0});
  const Tensor bad_bias = Tensor::zeros({3});
  CHECK_THROWS_WITH_AS(tape.matmul_add(x2, w, bad_bias),
                       doctest::Contains("bias"), DimensionError);
}

TEST_CASE("tanh forward and gradients") {
  Tape tape;
  const Tensor zero_in = Tensor::vector({0.0}, true);
  const Tensor y0 = tape.tanh(zero_in);
  CHECK(y0.values()[0] == 0.0);
  tape.backward(tape.sum(y0));
  CHECK(zero_in.grad()[0] == doctest::Approx(1.0).epsilon(1e-12));

  const Tensor x = Tensor::vector({1.5}, true);
  auto forward = [&]() {
    Tape t;
    return t.sum(t.tanh(x)).item();
  };
  Tape tape2;
  tape2.backward(tape2.sum(tape2.tanh(x)));
  CHECK(x.grad()[0] == doctest::Approx(0.18070663892364855).epsilon(1e-9));
  CHECK(testutil::max_rel_err(x.grad(), testutil::finite_diff(x, forward)) <
        1e-4);
}

TEST_CASE("mse values and shape check") {
  Tape tape;
  const Tensor a = Tensor::matrix(1, 2, {1.0, 1.0});
  CHECK(tape.mse(a, a).item() == 0.0);

  const Tensor zero = Tensor::zeros({1, 2});
  CHECK(tape.mse(a, zero).item() == doctest::Approx(1.0));
  const Tensor b = Tensor::matrix(1, 2, {2.0, 0.0});
  CHECK(tape.mse(b, zero).item() == doctest::Approx(2.0));

  const Tensor wide = Tensor::zeros({1, 3});
  CHECK_THROWS_AS(tape.mse(a, wide), DimensionError);
}

TEST_CASE("stop_gradient passes values and blocks gradients") {
  Tape tape;
  const Tensor x = Tensor::vector({3.0, 4.0}, true);
  const Tensor sg = tape.stop_gradient(x);
  CHECK(sg.values() == x.values());
  CHECK_FALSE(sg.requires_grad());

  // sum(sg(x)): nothing reaches x.
  Tape t1;
  const Tensor s1 = t1.sum(t1.stop_gradient(x));
  CHECK_FALSE(s1.requires_grad());
  x.zero_grad();
  CHECK(x.grad() == std::vector<double>{0.0, 0.0});

  // sum(x + sg(x)): only the raw term contributes.
  Tape t2;
  x.zero_grad();
  t2.backward(t2.sum(t2.add(x, t2.stop_gradient(x))));
  CHECK(x.grad() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("adam leaves parameters untouched under zero gradients") {
  const Tensor p = Tensor::vector({1.0, -2.0, 0.5}, true);
  const std::vector<double> before = p.values();
  AdamOptimizer opt(AdamConfig{});
  opt.add_param("p", p);
  for (int i = 0; i < 5; ++i) {
    opt.zero_grad();
    opt.step();
  }
  CHECK(p.values() == before);
}

TEST_CASE("adam first step moves a unit-gradient scalar by ~lr") {
  const Tensor p = Tensor::scalar(1.0, true);
  AdamOptimizer opt(AdamConfig{0.1, 0.9, 0.999, 1e-8});
  opt.add_param("p", p);
  p.grad()[0] = 1.0;
  opt.step();
  // Bias-corrected moments give a unit-magnitude direction at step 1.
  CHECK(p.values()[0] == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("adam decreases a convex quadratic over identical-gradient steps") {
  const Tensor p = Tensor::scalar(0.0, true);
  const Tensor target = Tensor::scalar(3.0);
  AdamOptimizer opt(AdamConfig{});
  opt.add_param("p", p);

  auto loss_value = [&]() {
    Tape tape;
    return tape.mse(p, target).item();
  };
  const double before = loss_value();
  for (int i = 0; i < 2; ++i) {
    Tape tape;
    const Tensor loss = tape.mse(p, target);
    opt.zero_grad();
    tape.backward(loss);
    opt.step();
  }
  CHECK(loss_value() < before);
}

TEST_CASE("adam rejects non-finite gradients naming the parameter") {
  const Tensor p = Tensor::scalar(1.0, true);
  AdamOptimizer opt(AdamConfig{});
  opt.add_param("embedding", p);
  p.grad()[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(opt.step(), doctest::Contains("embedding"),
                       NumericError);
}

TEST_CASE("gradient fidelity on random small MLPs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const std::size_t d_in = 1 + rng.below(4);
    const std::size_t d_hidden = 1 + rng.below(8);
    const std::size_t d_out = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(4);

    Mlp mlp({d_in, d_hidden, d_out}, rng);
    std::vector<double> xv(n * d_in);
    std::vector<double> tv(n * d_out);
    for (double& v : xv) v = rng.uniform(-1.5, 1.5);
    for (double& v : tv) v = rng.uniform(-1.5, 1.5);
    const Tensor x = Tensor::matrix(n, d_in, xv, true);
    const Tensor target = Tensor::matrix(n, d_out, tv);

    auto forward = [&]() {
      Tape tape;
      return tape.mse(mlp.forward(tape, x), target).item();
    };

    Tape tape;
    const Tensor loss = tape.mse(mlp.forward(tape, x), target);
    x.zero_grad();
    for (auto& layer : mlp.layers()) {
      layer.weights.zero_grad();
      layer.bias.zero_grad();
    }
    tape.backward(loss);

    for (auto& layer : mlp.layers()) {
      CHECK(testutil::max_rel_err(
                layer.weights.grad(),
                testutil::finite_diff(layer.weights, forward)) < 1e-4);
      CHECK(testutil::max_rel_err(layer.bias.grad(), testutil::finite_diff(
                                                         layer.bias, forward)) <
            1e-4);
    }
    CHECK(testutil::max_rel_err(x.grad(), testutil::finite_diff(x, forward)) <
          1e-4);
  }
}

TEST_CASE("tape determinism: identical seeds give identical loss sequences") {
  auto run_losses = [](std::uint64_t seed) {
    Rng rng(seed);
    Mlp mlp({2, 6, 2}, rng);
    std::vector<double> xv(8);
    for (double& v : xv) v = rng.uniform(-1.0, 1.0);
    const Tensor x = Tensor::matrix(4, 2, xv);

    AdamOptimizer opt(AdamConfig{});
    for (std::size_t l = 0; l < mlp.layers().size(); ++l) {
      opt.add_param("w" + std::to_string(l), mlp.layers()[l].weights);
      opt.add_param("b" + std::to_string(l), mlp.layers()[l].bias);
    }

    std::vector<double> losses;
    for (int stepno = 0; stepno < 20; ++stepno) {
      Tape tape;
      const Tensor loss = tape.mse(mlp.forward(tape, x), x);
      losses.push_back(loss.item());
      opt.zero_grad();
      tape.backward(loss);
      opt.step();
    }
    return losses;
  };
  CHECK(run_losses(7) == run_losses(7));
  CHECK(run_losses(7) != run_losses(8));
}
