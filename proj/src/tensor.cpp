#include "kgvae/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kgvae/error.hpp"

namespace kgvae {

std::string Shape::str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

namespace detail {

Matrix& Node::grad_buffer() {
  if (grad.empty()) grad = Matrix(value.rows(), value.cols());
  return grad;
}

void Node::accumulate(const Matrix& g) {
  Matrix& buf = grad_buffer();
  auto& d = buf.data();
  const auto& s = g.data();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k];
}

}  // namespace detail

using detail::Node;

namespace {

Shape shape_of(const Matrix& m) { return {m.rows(), m.cols()}; }

[[noreturn]] void shape_mismatch(const char* op, Shape a, Shape b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.str() + " and " + b.str());
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch(op, a.shape(), b.shape());
}

template <typename F>
Matrix map_values(const Matrix& x, F f) {
  Matrix out(x.rows(), x.cols());
  const auto& src = x.data();
  auto& dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = f(src[k]);
  return out;
}

// Unary elementwise op with derivative df(x, y) evaluated on input x and output y.
template <typename F, typename DF>
Tensor unary(const Tensor& a, F f, DF df) {
  return make_result(map_values(a.value(), f), {a}, [df](Node& self) {
    Node& in = *self.parents[0];
    if (!in.requires_grad) return;
    Matrix& g = in.grad_buffer();
    const auto& x = in.value.data();
    const auto& y = self.value.data();
    const auto& up = self.grad.data();
    for (std::size_t k = 0; k < up.size(); ++k) g.data()[k] += up[k] * df(x[k], y[k]);
  });
}

// c += a * b (row-major, a: r x k, b: k x c)
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t r = a.rows(), inner = a.cols(), cols = b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = pa[i * inner + k];
      if (aik == 0.0) continue;
      const double* brow = pb + k * cols;
      double* crow = pc + i * cols;
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aik * brow[j];
    }
  }
}

// c += a^T * b (a: k x r, b: k x c)
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t inner = a.rows(), r = a.cols(), cols = b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t k = 0; k < inner; ++k) {
    const double* brow = pb + k * cols;
    for (std::size_t i = 0; i < r; ++i) {
      const double aki = pa[k * r + i];
      if (aki == 0.0) continue;
      double* crow = pc + i * cols;
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aki * brow[j];
    }
  }
}

// c += a * b^T (a: r x k, b: c x k)
void gemm_nt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t r = a.rows(), inner = a.cols(), cols = b.rows();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t i = 0; i < r; ++i) {
    const double* arow = pa + i * inner;
    for (std::size_t j = 0; j < cols; ++j) {
      const double* brow = pb + j * inner;
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += arow[k] * brow[k];
      pc[i * cols + j] += s;
    }
  }
}

}  // namespace

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Tensor(std::move(node));
}

double Tensor::item() const {
  if (node_->value.size() != 1) {
    throw ContractError("item() on a tensor of shape " + shape().str());
  }
  return node_->value.data()[0];
}

const Matrix& Tensor::grad() const {
  if (node_->grad.empty()) throw ContractError("tensor has no gradient");
  return node_->grad;
}

Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward_rule) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool needs = false;
  for (const auto& t : inputs) needs = needs || t.requires_grad();
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& t : inputs) node->parents.push_back(std::move(t.node_));
    node->backward = std::move(backward_rule);
  }
  return Tensor(std::move(node));
}

ComputationTape::ComputationTape(const Tensor& root) : root_(root.node_) {
  if (!root_->requires_grad) return;
  // Iterative post-order DFS: a node is emitted after all of its parents.
  std::unordered_set<const Node*> visited{root_.get()};
  std::vector<std::pair<std::shared_ptr<Node>, std::size_t>> stack;
  stack.emplace_back(root_, 0);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      const auto& parent = node->parents[next++];
      if (parent->requires_grad && visited.insert(parent.get()).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order_.push_back(std::move(node));
      stack.pop_back();
    }
  }
}

void ComputationTape::backward() {
  if (order_.empty()) return;
  for (auto& node : order_) {
    if (!node->parents.empty()) node->grad = Matrix();
  }
  root_->grad = Matrix(1, 1, 1.0);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    Node& node = **it;
    if (node.backward && !node.grad.empty()) node.backward(node);
  }
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.shape() != Shape{1, 1}) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? loss.shape().str() : std::string("undefined")));
  }
  ComputationTape(loss).backward();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_mismatch("matmul", a.shape(), b.shape());
  Matrix out(a.rows(), b.cols());
  gemm_acc(a.value(), b.value(), out);
  return make_result(std::move(out), {a, b}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    if (x.requires_grad) gemm_nt_acc(self.grad, y.value, x.grad_buffer());
    if (y.requires_grad) gemm_tn_acc(x.value, self.grad, y.grad_buffer());
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  Matrix out = a.value();
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += b.value().data()[k];
  return make_result(std::move(out), {a, b}, [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) p->accumulate(self.grad);
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  Matrix out = a.value();
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] -= b.value().data()[k];
  return make_result(std::move(out), {a, b}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    if (x.requires_grad) x.accumulate(self.grad);
    if (y.requires_grad) {
      auto& g = y.grad_buffer().data();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] -= self.grad.data()[k];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  Matrix out = a.value();
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] *= b.value().data()[k];
  return make_result(std::move(out), {a, b}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    const auto& up = self.grad.data();
    if (x.requires_grad) {
      auto& g = x.grad_buffer().data();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += up[k] * y.value.data()[k];
    }
    if (y.requires_grad) {
      auto& g = y.grad_buffer().data();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += up[k] * x.value.data()[k];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(
      a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(
      a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor transpose(const Tensor& a) {
  const Matrix& x = a.value();
  Matrix out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  }
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& in = *self.parents[0];
    Matrix& g = in.grad_buffer();
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) += self.grad(j, i);
    }
  });
}

Tensor row_sum(const Tensor& a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (double v : x.row(i)) s += v;
    out(i, 0) = s;
  }
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& in = *self.parents[0];
    Matrix& g = in.grad_buffer();
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const double up = self.grad(i, 0);
      for (double& v : g.row(i)) v += up;
    }
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return make_result(Matrix(1, 1, s), {a}, [](Node& self) {
    Node& in = *self.parents[0];
    const double up = self.grad.data()[0];
    for (double& v : in.grad_buffer().data()) v += up;
  });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
  return unary(
      a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor abs(const Tensor& a) {
  return unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor reciprocal(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / x; }, [](double x, double) { return -1.0 / (x * x); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw ContractError("clamp: lo > hi");
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor add_bias(const Tensor& a, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) shape_mismatch("add_bias", a.shape(), bias.shape());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias.value()(0, j);
  }
  return make_result(std::move(out), {a, bias}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& b = *self.parents[1];
    if (x.requires_grad) x.accumulate(self.grad);
    if (b.requires_grad) {
      Matrix& g = b.grad_buffer();
      for (std::size_t i = 0; i < self.grad.rows(); ++i) {
        for (std::size_t j = 0; j < self.grad.cols(); ++j) g(0, j) += self.grad(i, j);
      }
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape.numel() != a.shape().numel()) shape_mismatch("reshape", a.shape(), shape);
  Matrix out(shape.rows, shape.cols, a.value().data());
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& in = *self.parents[0];
    auto& g = in.grad_buffer().data();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += self.grad.data()[k];
  });
}

Tensor masked_select(const Tensor& a, const std::vector<bool>& row_mask,
                     const std::vector<bool>& col_mask) {
  if (row_mask.size() != a.rows() || col_mask.size() != a.cols()) {
    shape_mismatch("masked_select", a.shape(), Shape{row_mask.size(), col_mask.size()});
  }
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < row_mask.size(); ++i) {
    if (row_mask[i]) rows.push_back(i);
  }
  for (std::size_t j = 0; j < col_mask.size(); ++j) {
    if (col_mask[j]) cols.push_back(j);
  }
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = a.value()(rows[r], cols[c]);
  }
  return make_result(std::move(out), {a}, [rows, cols](Node& self) {
    Node& in = *self.parents[0];
    Matrix& g = in.grad_buffer();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) g(rows[r], cols[c]) += self.grad(r, c);
    }
  });
}

}  // namespace kgvae
