#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "kgvae/error.hpp"
#include "kgvae/optim.hpp"
#include "kgvae/params.hpp"
#include "kgvae/tensor.hpp"
#include "support.hpp"

using namespace kgvae;
using namespace kgvae::testing;

namespace {

Tensor weighted_sum(const Tensor& y, const Matrix& w) { return sum(mul(y, Tensor::constant(w))); }

}  // namespace

TEST_CASE("matmul forward matches hand computation") {
  const Tensor a = Tensor::constant(Matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  const Tensor b = Tensor::constant(Matrix(3, 2, {7, 8, 9, 10, 11, 12}));
  const Tensor c = matmul(a, b);
  CHECK(c.shape() == Shape{2, 2});
  // [1*7+2*9+3*11, 1*8+2*10+3*12; 4*7+5*9+6*11, 4*8+5*10+6*12]
  CHECK(c.value() == Matrix(2, 2, {58, 64, 139, 154}));
}

TEST_CASE("shape mismatch names both shapes") {
  const Tensor a = Tensor::constant(Matrix(2, 3));
  const Tensor b = Tensor::constant(Matrix(2, 3));
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, Tensor::constant(Matrix(3, 2))), ShapeError);
  CHECK_THROWS_AS(add_bias(a, Tensor::constant(Matrix(1, 2))), ShapeError);
  CHECK_THROWS_AS(reshape(a, {4, 2}), ShapeError);
}

TEST_CASE("elementary derivatives") {
  Tensor x = Tensor::parameter(Matrix(1, 1, 0.0));
  backward(sigmoid(x));
  CHECK(x.grad()(0, 0) == doctest::Approx(0.25).epsilon(1e-15));

  Tensor y = Tensor::parameter(Matrix(1, 1, 2.0));
  backward(log(y));
  CHECK(y.grad()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  Tensor v = Tensor::parameter(Matrix(1, 3, {1, 2, 3}));
  backward(sum(square(v)));
  CHECK(v.grad() == Matrix(1, 3, {2, 4, 6}));
}

TEST_CASE("constants receive no gradient") {
  Tensor c = Tensor::constant(Matrix(1, 2, {1, 2}));
  Tensor p = Tensor::parameter(Matrix(1, 2, {3, 4}));
  backward(sum(mul(c, p)));
  CHECK_FALSE(c.has_grad());
  CHECK(p.has_grad());
  CHECK_THROWS_AS(c.grad(), ContractError);
}

TEST_CASE("backward requires a scalar") {
  Tensor p = Tensor::parameter(Matrix(2, 2, 1.0));
  CHECK_THROWS_AS(backward(square(p)), ContractError);
}

TEST_CASE("clamp passes gradient inside and blocks it outside") {
  Tensor x = Tensor::parameter(Matrix(1, 3, {-3.0, 0.5, 3.0}));
  backward(sum(clamp(x, -1.0, 1.0)));
  CHECK(x.grad() == Matrix(1, 3, {0.0, 1.0, 0.0}));
}

TEST_CASE("masked_select and reshape route gradients back") {
  Tensor x = Tensor::parameter(Matrix(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
  const Tensor sel = masked_select(x, {true, false, true}, {false, true, true});
  CHECK(sel.value() == Matrix(2, 2, {2, 3, 8, 9}));
  backward(sum(reshape(sel, {1, 4})));
  CHECK(x.grad() == Matrix(3, 3, {0, 1, 1, 0, 0, 0, 0, 1, 1}));
}

TEST_CASE("every primitive matches central finite differences") {
  Rng rng(20240601);
  using Unary = std::function<Tensor(const Tensor&)>;
  struct Case {
    const char* name;
    Unary op;
    double lo, hi;
  };
  const std::vector<Case> unary_cases = {
      {"scale", [](const Tensor& x) { return scale(x, -1.7); }, -2, 2},
      {"add_scalar", [](const Tensor& x) { return add_scalar(x, 0.3); }, -2, 2},
      {"transpose", [](const Tensor& x) { return transpose(x); }, -2, 2},
      {"row_sum", [](const Tensor& x) { return row_sum(x); }, -2, 2},
      {"sigmoid", [](const Tensor& x) { return sigmoid(x); }, -2, 2},
      {"relu", [](const Tensor& x) { return relu(x); }, -2, 2},
      {"exp", [](const Tensor& x) { return exp(x); }, -2, 2},
      {"log", [](const Tensor& x) { return log(x); }, 0.1, 2},
      {"square", [](const Tensor& x) { return square(x); }, -2, 2},
      {"abs", [](const Tensor& x) { return abs(x); }, -2, 2},
      {"reciprocal", [](const Tensor& x) { return reciprocal(x); }, 0.2, 2},
      {"clamp", [](const Tensor& x) { return clamp(x, -1.0, 1.0); }, -2, 2},
      {"reshape", [](const Tensor& x) { return reshape(x, {x.cols(), x.rows()}); }, -2, 2},
      {"masked_select",
       [](const Tensor& x) {
         std::vector<bool> rows(x.rows(), true), cols(x.cols(), true);
         rows[0] = false;
         return masked_select(x, rows, cols);
       },
       -2, 2},
  };
  constexpr int kTrials = 100;
  for (const auto& c : unary_cases) {
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      Tensor x = Tensor::parameter(random_matrix(rng, 3, 4, c.lo, c.hi));
      const Tensor probe = c.op(x);
      const Matrix w = random_matrix(rng, probe.rows(), probe.cols());
      worst = std::max(worst, max_gradient_error([&] { return weighted_sum(c.op(x), w); }, {x}));
    }
    INFO(c.name);
    CHECK(worst < 1e-4);
  }

  using Binary = std::function<Tensor(const Tensor&, const Tensor&)>;
  const std::vector<std::pair<const char*, Binary>> binary_cases = {
      {"add", [](const Tensor& a, const Tensor& b) { return add(a, b); }},
      {"sub", [](const Tensor& a, const Tensor& b) { return sub(a, b); }},
      {"mul", [](const Tensor& a, const Tensor& b) { return mul(a, b); }},
      {"matmul", [](const Tensor& a, const Tensor& b) { return matmul(a, transpose(b)); }},
      {"add_bias",
       [](const Tensor& a, const Tensor& b) {
         return add_bias(a, masked_select(b, {true, false, false}, {true, true, true, true}));
       }},
  };
  for (const auto& [name, op] : binary_cases) {
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      Tensor a = Tensor::parameter(random_matrix(rng, 3, 4));
      Tensor b = Tensor::parameter(random_matrix(rng, 3, 4));
      const Matrix w = random_matrix(rng, op(a, b).rows(), op(a, b).cols());
      worst = std::max(worst, max_gradient_error([&] { return weighted_sum(op(a, b), w); }, {a, b}));
    }
    INFO(name);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("chained sigmoid of matmul matches finite differences") {
  Rng rng(7);
  Tensor a = Tensor::parameter(random_matrix(rng, 4, 3));
  Tensor b = Tensor::parameter(random_matrix(rng, 3, 5));
  const Matrix w = random_matrix(rng, 4, 5);
  CHECK(max_gradient_error([&] { return weighted_sum(sigmoid(matmul(a, b)), w); }, {a, b}) < 1e-4);
}

TEST_CASE("gradients accumulate linearly over separate backward passes") {
  Rng rng(11);
  Tensor x = Tensor::parameter(random_matrix(rng, 2, 3));
  auto loss1 = [&] { return sum(square(x)); };
  auto loss2 = [&] { return sum(sigmoid(x)); };

  backward(add(loss1(), loss2()));
  const Matrix joint = x.grad();

  x.zero_grad();
  backward(loss1());
  backward(loss2());
  const Matrix separate = x.grad();
  for (std::size_t k = 0; k < joint.size(); ++k) {
    CHECK(joint.data()[k] == doctest::Approx(separate.data()[k]).epsilon(1e-14));
  }
}

TEST_CASE("shared subexpressions are differentiated once per use") {
  Tensor x = Tensor::parameter(Matrix(1, 1, 3.0));
  const Tensor y = square(x);
  backward(sum(add(y, y)));  // d(2x^2)/dx = 4x
  CHECK(x.grad()(0, 0) == doctest::Approx(12.0));
}

TEST_CASE("forward pass is deterministic") {
  Rng r1(5), r2(5);
  const Matrix a = random_matrix(r1, 5, 5), b = random_matrix(r2, 5, 5);
  const Tensor x = sigmoid(matmul(Tensor::constant(a), Tensor::constant(a)));
  const Tensor y = sigmoid(matmul(Tensor::constant(b), Tensor::constant(b)));
  CHECK(x.value() == y.value());
}

TEST_CASE("adam first step moves by about lr") {
  Tensor x = Tensor::parameter(Matrix(1, 1, 1.0));
  Adam opt({x}, AdamOptions{.lr = 0.1});
  backward(sum(square(x)));
  opt.step();
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  CHECK(x.value()(0, 0) == doctest::Approx(1.0 - 0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));
  CHECK(opt.steps_taken() == 1);
}

TEST_CASE("adam leaves parameters with zero gradient unchanged") {
  Tensor x = Tensor::parameter(Matrix(1, 2, {0.7, -0.3}));
  Tensor y = Tensor::parameter(Matrix(1, 2, {1.0, 1.0}));
  Adam opt({x, y}, AdamOptions{.lr = 0.1});
  backward(add(sum(scale(x, 0.0)), sum(y)));
  opt.step();
  CHECK(x.value() == Matrix(1, 2, {0.7, -0.3}));
}

TEST_CASE("adam needs gradients") {
  Tensor x = Tensor::parameter(Matrix(1, 1, 1.0));
  Adam opt({x}, AdamOptions{});
  CHECK_THROWS_AS(opt.step(), ContractError);
}

TEST_CASE("adam runs are bit-identical") {
  auto run = [] {
    Rng rng(99);
    Tensor w = Tensor::parameter(random_matrix(rng, 3, 3));
    const Tensor target = Tensor::constant(random_matrix(rng, 3, 3));
    Adam opt({w}, AdamOptions{.lr = 0.01});
    for (int i = 0; i < 50; ++i) {
      opt.zero_grad();
      backward(sum(square(sub(sigmoid(matmul(w, w)), target))));
      opt.step();
    }
    return w.value();
  };
  CHECK(run() == run());
}

TEST_CASE("parameter checkpoints round-trip bit-exactly") {
  ParameterMap params;
  params.emplace("a", Tensor::parameter(Matrix(1, 4, {1.0 / 3.0, -0.0, 4.9e-324, 1e308})));
  Rng rng(3);
  params.emplace("b.w", Tensor::parameter(random_matrix(rng, 3, 2)));
  const auto path = std::filesystem::temp_directory_path() / "kgvae_params_roundtrip.json";
  save_parameters(path, params);
  const ParameterMap loaded = load_parameters(path);
  REQUIRE(loaded.size() == 2);
  for (const auto& [name, t] : params) {
    const auto& src = t.value().data();
    const auto& dst = loaded.at(name).value().data();
    REQUIRE(src.size() == dst.size());
    for (std::size_t k = 0; k < src.size(); ++k) {
      CHECK(std::memcmp(&src[k], &dst[k], sizeof(double)) == 0);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("assign_parameters rejects mismatched shapes") {
  ParameterMap target, source;
  target.emplace("w", Tensor::parameter(Matrix(2, 2)));
  source.emplace("w", Tensor::parameter(Matrix(2, 3)));
  CHECK_THROWS_AS(assign_parameters(target, source), ParseError);
}
