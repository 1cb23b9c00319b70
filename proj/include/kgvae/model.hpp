#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgvae/graph.hpp"
#include "kgvae/params.hpp"
#include "kgvae/rng.hpp"
#include "kgvae/tensor.hpp"

namespace kgvae {

enum class DecoderType { kFc, kDot, kSbm };

std::string to_string(DecoderType d);
DecoderType decoder_from_string(const std::string& s);

/// Layer widths. `encoder_hidden` are the ReLU GCN layers before the
/// mu / log-variance heads, whose width is `latent_dim`.
struct ArchConfig {
  std::string preset = "desk";
  std::vector<std::size_t> encoder_hidden{32, 32};
  std::size_t latent_dim = 16;
  std::vector<std::size_t> decoder_hidden{64, 64};  // FC decoder
  std::size_t transform_dim = 16;                   // SBM z* width

  static ArchConfig desk();
  static ArchConfig paper();
  static ArchConfig from_preset(const std::string& name);
};

struct ModelConfig {
  ArchConfig arch;
  DecoderType decoder = DecoderType::kFc;
  std::size_t n_max = 0;
  /// Node-feature width; equals n_max when identity features are used.
  std::size_t feature_dim = 0;
  bool identity_features = true;
};

/// Symmetric-normalized propagation operator D^-1/2 (A + I) D^-1/2.
Matrix normalized_adjacency(const Matrix& adjacency);

enum class Activation { kIdentity, kRelu };

/// act(a_hat * h * w + bias); `bias` may be undefined.
Tensor gcn_layer(const Tensor& a_hat, const Tensor& h, const Tensor& w, const Tensor& bias,
                 Activation act);

/// Per-node diagonal Gaussian q(z_i) = N(mu_i, diag(exp(log_var_i))).
/// Rows beyond the active node count are padding.
struct Posterior {
  Tensor mu;
  Tensor log_var;
  std::vector<bool> mask;
  std::size_t n_active = 0;
};

/// Constant encoder inputs for one graph, padded to n_max.
struct GraphInput {
  Tensor a_hat;
  Tensor features;
  std::vector<bool> mask;
  std::size_t n = 0;
};

/// GCN encoder with an FC, dot-product or SBM decoder.
class GraphVae {
 public:
  GraphVae(ModelConfig config, Rng& init_rng);
  /// Parameters supplied externally (e.g. from a checkpoint); names and
  /// shapes are checked against `config`.
  GraphVae(ModelConfig config, const ParameterMap& params);

  const ModelConfig& config() const { return config_; }
  ParameterMap& parameters() { return params_; }
  const ParameterMap& parameters() const { return params_; }
  std::vector<Tensor> parameter_list() const;

  GraphInput prepare(const Graph& g) const;

  Posterior encode(const GraphInput& in) const;
  Posterior encode(const Graph& g) const { return encode(prepare(g)); }

  /// z = mu + exp(log_var / 2) * eps with eps ~ N(0, I); padding rows are 0.
  Tensor reparameterize(const Posterior& post, Rng& rng) const;

  /// Probabilistic adjacency (n x n tensor) for the first n latent rows.
  Tensor decode(const Tensor& z, std::size_t n) const;

  /// z ~ N(0, I) on n nodes, decode, and sample edges.
  Graph sample_from_prior(std::size_t n, Rng& rng) const;

 private:
  ModelConfig config_;
  ParameterMap params_;

  void init_parameters(Rng& rng);
  const Tensor& param(const std::string& name) const;
};

/// Shapes of every parameter for a configuration, keyed by name.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& config);

/// Mask row i true for i < n, length n_max.
std::vector<bool> active_mask(std::size_t n, std::size_t n_max);

}  // namespace kgvae
