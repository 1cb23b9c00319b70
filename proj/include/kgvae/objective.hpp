#pragma once

#include <cstdint>

#include "kgvae/graph.hpp"
#include "kgvae/kernels.hpp"
#include "kgvae/model.hpp"
#include "kgvae/tensor.hpp"

namespace kgvae {

/// Loss components; `total` is minimized (negative kernel ELBO with the KL
/// weighted by beta).
struct LossBreakdown {
  Tensor recon_nll;
  Tensor kl;
  Tensor kernel_penalty;
  Tensor total;
  double beta = 1.0;
};

/// Plain-value copy of a LossBreakdown for logging.
struct LossValues {
  double recon_nll = 0.0;
  double kl = 0.0;
  double kernel_penalty = 0.0;
  double total = 0.0;

  static LossValues of(const LossBreakdown& b);
};

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] inside logs.
inline constexpr double kProbFloor = 1e-7;

/// Mean over unordered pairs i < j of the Bernoulli negative log-likelihood.
Tensor bernoulli_nll(const Graph& a, const Tensor& pa);

/// 0.5 * sum(mu^2 + sigma^2 - 1 - log sigma^2) over active nodes, divided by
/// the active node count.
Tensor gaussian_kl(const Posterior& post);

/// recon_nll + beta * kl, the standard graph-VAE loss.
Tensor standard_elbo_loss(const Graph& a, const Posterior& post, const Tensor& pa, double beta);

/// recon_nll + beta * kl + sum_u lambda_u D^2_u(A, pa).
LossBreakdown kernel_elbo_loss(const Graph& a, const Posterior& post, const Tensor& pa,
                               const KernelSet& ks, double beta);

/// Exact-enumeration check of the joint-reconstruction lower bound with the
/// degree-histogram feature map (l = n + 1) and an isotropic Gaussian
/// feature model of variance 1 / (2 lambda).
struct BoundCheckReport {
  std::size_t n = 0;
  double lambda = 0.0;
  std::size_t configurations = 0;
  std::size_t graphs_enumerated = 0;
  /// Largest normalizer C(z) seen.
  double max_normalizer = 0.0;
  /// min over (z, A) of [ln p(phi(A)|z) - ln C(z)] - [-lambda D^2 + const].
  double min_bound_margin = 0.0;
  /// Largest |D^2 via kernel - ||phi(A) - phi(A~)||^2| seen.
  double max_feature_route_gap = 0.0;
  /// |(l/2)(ln 2 lambda - ln 2 pi) - ln((lambda/pi)^(l/2))|.
  double constant_gap = 0.0;
  bool normalizer_ok = false;
  bool bound_ok = false;

  bool passed() const { return normalizer_ok && bound_ok; }
};

/// Draws `z_samples` random (decoder, z) pairs on n nodes and checks
/// C(z) <= 1 + 1e-9 and the bound chain within 1e-9 for every simple graph
/// on n nodes. Throws ValidationError for n > 4.
BoundCheckReport verify_proposition1(std::size_t n, std::size_t z_samples, double lambda,
                                     std::uint64_t seed);

}  // namespace kgvae
