#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kgvae/matrix.hpp"

namespace kgvae {

/// Two-dimensional shape; scalars are 1x1 and vectors are 1xn or nx1.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t numel() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Pushes this node's grad into its parents' grads.
  std::function<void(Node&)> backward;

  void accumulate(const Matrix& g);
  Matrix& grad_buffer();
};

}  // namespace detail

/// Dense value participating in reverse-mode differentiation.
///
/// A Tensor is a shared handle: copies alias the same node. Results of
/// operations keep references to their inputs, so the dynamic computation
/// graph lives as long as the output tensor does.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor parameter(Matrix value);
  static Tensor scalar(double v) { return constant(Matrix(1, 1, v)); }

  bool defined() const { return node_ != nullptr; }
  Shape shape() const { return {node_->value.rows(), node_->value.cols()}; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }

  const Matrix& value() const { return node_->value; }
  /// Mutable access for optimizers and checkpoint loading only.
  Matrix& mutable_value() { return node_->value; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  /// Gradient; throws ContractError if none has been accumulated.
  const Matrix& grad() const;
  void zero_grad() { node_->grad = Matrix(); }

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  friend class ComputationTape;
  friend Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                            std::function<void(detail::Node&)> backward);

  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Topologically ordered record of every node reachable from a root whose
/// gradient is needed: each node appears after all of its inputs.
class ComputationTape {
 public:
  explicit ComputationTape(const Tensor& root);

  std::size_t size() const { return order_.size(); }

  /// Seeds d(root)/d(root) = 1 and runs backward rules in reverse order.
  /// Gradients of intermediate nodes are reset first; leaf gradients
  /// (parameters) accumulate across calls.
  void backward();

 private:
  std::shared_ptr<detail::Node> root_;
  std::vector<std::shared_ptr<detail::Node>> order_;
};

/// Populates p.grad = d(loss)/d(p) for every parameter reachable from `loss`.
/// Throws ContractError when `loss` is not 1x1.
void backward(const Tensor& loss);

/// Internal building block for primitive ops; exposed for fused kernels.
Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<void(detail::Node&)> backward);

// Primitive operations. Shape mismatches throw ShapeError naming both shapes.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor transpose(const Tensor& a);
Tensor row_sum(const Tensor& a);  // r x c -> r x 1
Tensor sum(const Tensor& a);      // -> 1 x 1
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
Tensor abs(const Tensor& a);         // subgradient 0 at 0
Tensor reciprocal(const Tensor& a);
/// Pass-through gradient strictly inside (lo, hi) and at the bounds when the
/// input equals them; zero gradient outside.
Tensor clamp(const Tensor& a, double lo, double hi);
/// Adds a 1 x c bias row to every row of an r x c matrix.
Tensor add_bias(const Tensor& a, const Tensor& bias);
Tensor reshape(const Tensor& a, Shape shape);
/// Sub-matrix of the rows and columns whose mask entries are true.
Tensor masked_select(const Tensor& a, const std::vector<bool>& row_mask,
                     const std::vector<bool>& col_mask);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }

}  // namespace kgvae
