#include "damcc/autodiff.hpp"
#include "damcc/gradcheck_suite.hpp"
#include "damcc/nn.hpp"

#include <doctest.h>

#include <cmath>

using namespace damcc;
using namespace damcc::ad;

namespace {

// Central differences written out here so the check does not lean on grad_check.
Matrix numeric_grad(const std::function<double()>& f, Matrix& x, double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f();
    x(i) = keep - h;
    const double down = f();
    x(i) = keep;
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("composite expression matches central differences") {
  Tensor a = Tensor::parameter(Matrix::Random(3, 4));
  Tensor b = Tensor::parameter(Matrix::Random(4, 2));
  Tensor r = Tensor::parameter(Matrix::Random(1, 2));
  auto f = [&] {
    const Tensor h = tanh(add(matmul(a, b), r));
    return sum(mul(sigmoid(h), h));
  };
  const Tensor loss = f();
  backward(loss);
  for (Tensor* t : {&a, &b, &r}) {
    const Matrix g = numeric_grad([&] { NoGradGuard ng; return f().item(); }, t->mutable_value());
    CHECK((g - t->grad()).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("gradients accumulate until zero_grad and start empty") {
  Tensor x = Tensor::parameter(Matrix::Constant(1, 1, 2.0));
  CHECK(x.grad().size() == 0);
  backward(sum(mul(x, x)));
  CHECK(x.grad()(0, 0) == doctest::Approx(4.0));
  backward(sum(mul(x, x)));
  CHECK(x.grad()(0, 0) == doctest::Approx(8.0));
  x.zero_grad();
  CHECK(x.grad().size() == 0);
  // A shared subexpression collects both paths.
  const Tensor y = scale(x, 3.0);
  backward(sum(add(y, y)));
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("no-grad mode records nothing") {
  Tensor x = Tensor::parameter(Matrix::Ones(2, 2));
  Tensor y;
  {
    NoGradGuard g;
    CHECK_FALSE(grad_enabled());
    y = sum(mul(x, x));
  }
  CHECK(grad_enabled());
  CHECK_FALSE(y.requires_grad());
  CHECK(y.node()->parents.empty());
  CHECK(y.item() == 4.0);
}

TEST_CASE("shape mismatches throw") {
  const Tensor a = Tensor::constant(Matrix::Ones(2, 3));
  const Tensor b = Tensor::constant(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(matmul(a, b), ShapeError);
  CHECK_THROWS_AS(add(a, b), ShapeError);
  CHECK_THROWS_AS(mul(a, b), ShapeError);
  CHECK_THROWS_AS(slice_cols(a, 2, 2), ShapeError);
  CHECK_THROWS_AS(concat_rows({a, b}), ShapeError);
  CHECK_THROWS_AS(a.item(), ShapeError);
  CHECK_THROWS(backward(a));
}

TEST_CASE("stable primitives stay finite at extreme inputs") {
  Matrix big(1, 3);
  big << 1000, -1000, 0;
  Tensor x = Tensor::parameter(big);
  const Tensor l = row_logsumexp(x);
  CHECK(l.item() == doctest::Approx(1000.0));
  const Tensor s = bce_with_logits(x, Matrix::Zero(1, 3));
  CHECK(std::isfinite(s.item()));
  backward(s);
  CHECK(x.grad().allFinite());
  const Tensor c = cosine_cost(Tensor::constant(Matrix::Zero(1, 3)), Tensor::constant(Matrix::Ones(2, 3)));
  CHECK(c.value().isConstant(1.0));
}

TEST_CASE("built-in gradient checker agrees on every op and model piece") {
  for (const auto& c : run_gradcheck_suite(7)) {
    CAPTURE(c.name);
    CAPTURE(c.result.worst);
    CHECK(c.result.max_rel_error < 1e-4);
    CHECK(c.result.coords_checked > 0);
  }
}

TEST_CASE("grad_check flags a wrong gradient") {
  Tensor x = Tensor::parameter(Matrix::Random(2, 2));
  // Cutting the graph through a constant hides x's contribution to the output.
  auto f = [&] { return sum(mul(x, Tensor::constant(x.value()))); };
  CHECK(grad_check(f, {x}).max_rel_error > 0.1);
}

TEST_CASE("adam skips parameters without gradient and moves the others") {
  nn::ParameterSet ps;
  Rng rng(3);
  Tensor used = ps.add("used", 2, 2, rng);
  Tensor idle = ps.add("idle", 2, 2, rng);
  const Matrix idle0 = idle.value();
  const Matrix used0 = used.value();
  nn::AdamConfig ac;
  ac.lr = 0.01;
  nn::Adam opt(ps, ac);
  backward(sum(mul(used, used)));
  opt.step();
  CHECK(idle.value() == idle0);
  // First Adam step moves every coordinate by lr against the gradient sign.
  const Matrix delta = used.value() - used0;
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(delta(i) == doctest::Approx(-0.01 * (used0(i) > 0 ? 1 : -1)).epsilon(1e-4));
}
