#pragma once

#include <cstdint>
#include <vector>

#include "kgvae/tensor.hpp"

namespace kgvae {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moment estimates.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  /// One update from the currently accumulated gradients. Throws
  /// ContractError when a parameter has no gradient.
  void step();
  void zero_grad();

  std::int64_t steps_taken() const { return t_; }
  const AdamOptions& options() const { return opts_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions opts_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t t_ = 0;
};

}  // namespace kgvae
