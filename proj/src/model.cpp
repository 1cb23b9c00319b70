#include "kgvae/model.hpp"

#include <cmath>

#include "kgvae/error.hpp"
#include "kgvae/kernels.hpp"

namespace kgvae {

std::string to_string(DecoderType d) {
  switch (d) {
    case DecoderType::kFc: return "fc";
    case DecoderType::kDot: return "dot";
    case DecoderType::kSbm: return "sbm";
  }
  return "?";
}

DecoderType decoder_from_string(const std::string& s) {
  if (s == "fc") return DecoderType::kFc;
  if (s == "dot") return DecoderType::kDot;
  if (s == "sbm") return DecoderType::kSbm;
  throw ValidationError("unknown decoder '" + s + "' (expected fc, dot or sbm)");
}

ArchConfig ArchConfig::desk() { return ArchConfig{}; }

ArchConfig ArchConfig::paper() {
  ArchConfig a;
  a.preset = "paper";
  a.encoder_hidden = {128, 128};
  a.latent_dim = 256;
  a.decoder_hidden = {512, 512, 512};
  a.transform_dim = 256;
  return a;
}

ArchConfig ArchConfig::from_preset(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw ValidationError("unknown architecture preset '" + name + "'");
}

std::vector<bool> active_mask(std::size_t n, std::size_t n_max) {
  std::vector<bool> m(n_max, false);
  for (std::size_t i = 0; i < n && i < n_max; ++i) m[i] = true;
  return m;
}

Matrix normalized_adjacency(const Matrix& adjacency) {
  const std::size_t n = adjacency.rows();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < n; ++j) d += adjacency(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency(i, j) + (i == j ? 1.0 : 0.0);
      out(i, j) = inv_sqrt[i] * a * inv_sqrt[j];
    }
  }
  return out;
}

Tensor gcn_layer(const Tensor& a_hat, const Tensor& h, const Tensor& w, const Tensor& bias,
                 Activation act) {
  Tensor out = matmul(a_hat, matmul(h, w));
  if (bias.defined()) out = add_bias(out, bias);
  return act == Activation::kRelu ? relu(out) : out;
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& c) {
  std::vector<std::pair<std::string, Shape>> out;
  const auto& a = c.arch;
  std::size_t width = c.feature_dim;
  for (std::size_t l = 0; l < a.encoder_hidden.size(); ++l) {
    const std::string p = "enc.gcn" + std::to_string(l);
    out.push_back({p + ".w", {width, a.encoder_hidden[l]}});
    out.push_back({p + ".b", {1, a.encoder_hidden[l]}});
    width = a.encoder_hidden[l];
  }
  out.push_back({"enc.mu.w", {width, a.latent_dim}});
  out.push_back({"enc.mu.b", {1, a.latent_dim}});
  out.push_back({"enc.logvar.w", {width, a.latent_dim}});
  out.push_back({"enc.logvar.b", {1, a.latent_dim}});

  switch (c.decoder) {
    case DecoderType::kFc: {
      width = c.n_max * a.latent_dim;
      for (std::size_t l = 0; l < a.decoder_hidden.size(); ++l) {
        const std::string p = "dec.fc" + std::to_string(l);
        out.push_back({p + ".w", {width, a.decoder_hidden[l]}});
        out.push_back({p + ".b", {1, a.decoder_hidden[l]}});
        width = a.decoder_hidden[l];
      }
      out.push_back({"dec.out.w", {width, c.n_max * c.n_max}});
      out.push_back({"dec.out.b", {1, c.n_max * c.n_max}});
      break;
    }
    case DecoderType::kDot:
      out.push_back({"dec.mp.w", {a.latent_dim, a.latent_dim}});
      break;
    case DecoderType::kSbm:
      out.push_back({"dec.f.w", {a.latent_dim, a.transform_dim}});
      out.push_back({"dec.f.b", {1, a.transform_dim}});
      out.push_back({"dec.lambda", {a.transform_dim, a.transform_dim}});
      break;
  }
  return out;
}

GraphVae::GraphVae(ModelConfig config, Rng& init_rng) : config_(std::move(config)) {
  init_parameters(init_rng);
}

GraphVae::GraphVae(ModelConfig config, const ParameterMap& params) : config_(std::move(config)) {
  for (const auto& [name, shape] : parameter_shapes(config_)) {
    params_.emplace(name, Tensor::parameter(Matrix(shape.rows, shape.cols)));
  }
  assign_parameters(params_, params);
}

void GraphVae::init_parameters(Rng& rng) {
  if (config_.n_max == 0 || config_.feature_dim == 0) {
    throw ValidationError("model config needs n_max and feature_dim");
  }
  // Glorot-uniform weights, zero biases; drawn in the fixed order above.
  for (const auto& [name, shape] : parameter_shapes(config_)) {
    Matrix m(shape.rows, shape.cols);
    const bool is_bias = name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0;
    if (!is_bias) {
      const double limit = std::sqrt(6.0 / static_cast<double>(shape.rows + shape.cols));
      for (double& v : m.data()) v = (2.0 * rng.uniform() - 1.0) * limit;
    }
    params_.emplace(name, Tensor::parameter(std::move(m)));
  }
}

const Tensor& GraphVae::param(const std::string& name) const { return params_.at(name); }

std::vector<Tensor> GraphVae::parameter_list() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(t);
  return out;
}

GraphInput GraphVae::prepare(const Graph& g) const {
  const std::size_t n = g.num_nodes();
  const std::size_t n_max = config_.n_max;
  if (n > n_max) {
    throw ValidationError("graph on " + std::to_string(n) + " nodes exceeds model n_max=" +
                          std::to_string(n_max));
  }
  Matrix adj(n_max, n_max);
  for (const auto& [i, j] : g.edges()) adj(i, j) = adj(j, i) = 1.0;

  Matrix x(n_max, config_.feature_dim);
  if (config_.identity_features) {
    for (std::size_t i = 0; i < n; ++i) x(i, i) = 1.0;
  } else {
    if (!g.features() || g.features()->cols() != config_.feature_dim) {
      throw ValidationError("graph features do not match model feature width " +
                            std::to_string(config_.feature_dim));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < config_.feature_dim; ++c) x(i, c) = (*g.features())(i, c);
    }
  }
  return {Tensor::constant(normalized_adjacency(adj)), Tensor::constant(std::move(x)),
          active_mask(n, n_max), n};
}

Posterior GraphVae::encode(const GraphInput& in) const {
  Tensor h = in.features;
  for (std::size_t l = 0; l < config_.arch.encoder_hidden.size(); ++l) {
    const std::string p = "enc.gcn" + std::to_string(l);
    h = gcn_layer(in.a_hat, h, param(p + ".w"), param(p + ".b"), Activation::kRelu);
  }
  Posterior post;
  post.mu = gcn_layer(in.a_hat, h, param("enc.mu.w"), param("enc.mu.b"), Activation::kIdentity);
  post.log_var = clamp(gcn_layer(in.a_hat, h, param("enc.logvar.w"), param("enc.logvar.b"),
                                 Activation::kIdentity),
                       -10.0, 10.0);
  post.mask = in.mask;
  post.n_active = in.n;
  return post;
}

namespace {

Tensor row_mask_matrix(const std::vector<bool>& mask, std::size_t cols) {
  Matrix m(mask.size(), cols);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) std::fill(m.row(i).begin(), m.row(i).end(), 1.0);
  }
  return Tensor::constant(std::move(m));
}

}  // namespace

Tensor GraphVae::reparameterize(const Posterior& post, Rng& rng) const {
  Matrix eps(post.mu.rows(), post.mu.cols());
  for (double& v : eps.data()) v = rng.normal();
  Tensor sigma = exp(scale(post.log_var, 0.5));
  Tensor z = add(post.mu, mul(sigma, Tensor::constant(std::move(eps))));
  return mul(z, row_mask_matrix(post.mask, z.cols()));
}

Tensor GraphVae::decode(const Tensor& z_in, std::size_t n) const {
  const std::size_t n_max = config_.n_max;
  if (z_in.rows() != n_max || z_in.cols() != config_.arch.latent_dim) {
    throw ShapeError("decode: latent shape " + z_in.shape().str() + ", expected " +
                     Shape{n_max, config_.arch.latent_dim}.str());
  }
  if (n == 0 || n > n_max) throw ValidationError("decode: active node count out of range");
  const auto mask = active_mask(n, n_max);
  const Tensor z = mul(z_in, row_mask_matrix(mask, z_in.cols()));

  Tensor logits;
  switch (config_.decoder) {
    case DecoderType::kFc: {
      Tensor h = reshape(z, {1, z.rows() * z.cols()});
      for (std::size_t l = 0; l < config_.arch.decoder_hidden.size(); ++l) {
        const std::string p = "dec.fc" + std::to_string(l);
        h = relu(add_bias(matmul(h, param(p + ".w")), param(p + ".b")));
      }
      h = add_bias(matmul(h, param("dec.out.w")), param("dec.out.b"));
      logits = masked_select(reshape(h, {n_max, n_max}), mask, mask);
      break;
    }
    case DecoderType::kDot: {
      // One message-passing round over the initial inner-product graph.
      const Tensor za = masked_select(z, mask, std::vector<bool>(z.cols(), true));
      Tensor affinity = sigmoid(matmul(za, transpose(za)));
      Tensor walk = transition_matrix(TransitionKernel{1, 1e-8}, affinity);
      Tensor z_star = add(za, matmul(walk, matmul(za, param("dec.mp.w"))));
      logits = matmul(z_star, transpose(z_star));
      break;
    }
    case DecoderType::kSbm: {
      const Tensor za = masked_select(z, mask, std::vector<bool>(z.cols(), true));
      Tensor z_star = relu(add_bias(matmul(za, param("dec.f.w")), param("dec.f.b")));
      logits = matmul(matmul(z_star, param("dec.lambda")), transpose(z_star));
      break;
    }
  }
  Tensor symmetric = scale(add(logits, transpose(logits)), 0.5);
  Matrix off_diag(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) off_diag(i, i) = 0.0;
  return mul(sigmoid(symmetric), Tensor::constant(std::move(off_diag)));
}

Graph GraphVae::sample_from_prior(std::size_t n, Rng& rng) const {
  Matrix z(config_.n_max, config_.arch.latent_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : z.row(i)) v = rng.normal();
  }
  const Tensor pa = decode(Tensor::constant(std::move(z)), n);
  return sample_adjacency(ProbAdjacency(pa.value()), rng.next_u64());
}

}  // namespace kgvae
