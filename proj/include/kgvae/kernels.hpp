#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "kgvae/graph.hpp"
#include "kgvae/tensor.hpp"

namespace kgvae {

/// Soft degree histogram kernel: bins b = 0..max_degree_bin, each node adds
/// max(0, 1 - slope * |d_i - b|) to bin b, and k(A, A') is the dot product
/// of the two histograms.
struct DegreeHistogramKernel {
  std::size_t max_degree_bin = 0;
  double slope = 0.1;
};

/// Expected-likelihood kernel on s-step random-walk transition matrices.
struct TransitionKernel {
  int steps = 1;
  double degree_floor = 1e-8;
};

using GraphKernel = std::variant<DegreeHistogramKernel, TransitionKernel>;

struct WeightedKernel {
  GraphKernel kernel;
  double weight = 0.0;
};

/// Weighted list of kernels; empty means no regularization.
struct KernelSet {
  std::vector<WeightedKernel> kernels;

  bool empty() const { return kernels.empty(); }
  /// Throws ValidationError on a negative weight or a step count < 1.
  void validate() const;
};

std::string describe(const GraphKernel& k);

/// (B+1)-vector (1 x (B+1)) soft histogram of an n x n (probabilistic)
/// adjacency. Throws ValidationError when n > B.
Tensor soft_histogram(const DegreeHistogramKernel& k, const Tensor& pa);

Tensor degree_kernel(const DegreeHistogramKernel& k, const Tensor& pa1, const Tensor& pa2);

/// (D^{-1} A)^s with rows of soft degree below the floor replaced by the
/// identity row, so every row sums to one.
Tensor transition_matrix(const TransitionKernel& k, const Tensor& pa);

/// sum_ij P^s(A)_ij P^s(A')_ij. The smaller adjacency is first padded with
/// isolated nodes.
Tensor transition_kernel(const TransitionKernel& k, const Tensor& pa1, const Tensor& pa2);

Tensor kernel_value(const GraphKernel& k, const Tensor& pa1, const Tensor& pa2);

/// k(x, x) + k(y, y) - 2 k(x, y).
Tensor d_squared(const GraphKernel& k, const Tensor& pa1, const Tensor& pa2);

/// sum_u lambda_u * D^2_u(A, pa); a zero scalar when the set is empty.
/// Transition powers shared between kernels are computed once.
Tensor regularizer(const KernelSet& ks, const Graph& a, const Tensor& pa);

/// Embeds an n x n adjacency in the top-left block of an m x m zero matrix.
Tensor pad_isolated(const Tensor& pa, std::size_t m);

/// Plain-value soft histogram, used where no gradient is needed.
std::vector<double> soft_histogram_values(const DegreeHistogramKernel& k, const Matrix& pa);

/// Kernel configuration as written in experiment configs; `max_degree_bin`
/// is filled in from the dataset when the set is built.
struct KernelSpec {
  enum class Type { kDegree, kTransition };
  Type type = Type::kDegree;
  int steps = 1;
  double lambda = 0.0;
};

KernelSet make_kernel_set(const std::vector<KernelSpec>& specs, std::size_t n_max);

/// Default weights per dataset family: transition kernels s = 1..5 and the
/// degree kernel. grid / lobster: e^2 and e^-4; protein: e^3 and 2e^-5.
std::vector<KernelSpec> default_kernel_specs(const std::string& dataset,
                                             double lambda_scale = 1.0);

}  // namespace kgvae
