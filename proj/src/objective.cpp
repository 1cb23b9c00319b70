#include "kgvae/objective.hpp"

#include <cmath>
#include <numbers>

#include "kgvae/error.hpp"
#include "kgvae/rng.hpp"

namespace kgvae {

LossValues LossValues::of(const LossBreakdown& b) {
  return {b.recon_nll.item(), b.kl.item(), b.kernel_penalty.item(), b.total.item()};
}

Tensor bernoulli_nll(const Graph& a, const Tensor& pa) {
  const std::size_t n = pa.rows();
  if (pa.cols() != n || a.num_nodes() != n) {
    throw ShapeError("bernoulli_nll: graph on " + std::to_string(a.num_nodes()) +
                     " nodes vs probabilities " + pa.shape().str());
  }
  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs == 0) return Tensor::scalar(0.0);

  Matrix present(n, n), absent(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      (a.has_edge(i, j) ? present : absent)(i, j) = 1.0;
    }
  }
  const Tensor p = clamp(pa, kProbFloor, 1.0 - kProbFloor);
  const Tensor log_p = log(p);
  const Tensor log_q = log(add_scalar(scale(p, -1.0), 1.0));
  const Tensor ll = add(sum(mul(Tensor::constant(std::move(present)), log_p)),
                        sum(mul(Tensor::constant(std::move(absent)), log_q)));
  return scale(ll, -1.0 / static_cast<double>(pairs));
}

Tensor gaussian_kl(const Posterior& post) {
  if (post.mu.shape() != post.log_var.shape()) {
    throw ShapeError("gaussian_kl: mu " + post.mu.shape().str() + " vs log_var " +
                     post.log_var.shape().str());
  }
  if (post.n_active == 0) return Tensor::scalar(0.0);
  Matrix mask(post.mu.rows(), post.mu.cols());
  for (std::size_t i = 0; i < mask.rows(); ++i) {
    if (i < post.mask.size() && post.mask[i]) {
      std::fill(mask.row(i).begin(), mask.row(i).end(), 1.0);
    }
  }
  const Tensor terms =
      sub(add_scalar(add(square(post.mu), exp(post.log_var)), -1.0), post.log_var);
  return scale(sum(mul(Tensor::constant(std::move(mask)), terms)),
               0.5 / static_cast<double>(post.n_active));
}

Tensor standard_elbo_loss(const Graph& a, const Posterior& post, const Tensor& pa, double beta) {
  return add(bernoulli_nll(a, pa), scale(gaussian_kl(post), beta));
}

LossBreakdown kernel_elbo_loss(const Graph& a, const Posterior& post, const Tensor& pa,
                               const KernelSet& ks, double beta) {
  LossBreakdown out;
  out.beta = beta;
  out.recon_nll = bernoulli_nll(a, pa);
  out.kl = gaussian_kl(post);
  const Tensor base = add(out.recon_nll, scale(out.kl, beta));
  if (ks.empty()) {
    out.kernel_penalty = Tensor::scalar(0.0);
    out.total = base;
  } else {
    out.kernel_penalty = regularizer(ks, a, pa);
    out.total = add(base, out.kernel_penalty);
  }
  return out;
}

namespace {

Graph graph_from_mask(std::size_t n, std::uint64_t bits) {
  std::vector<Edge> edges;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if ((bits >> k) & 1U) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return s;
}

}  // namespace

BoundCheckReport verify_proposition1(std::size_t n, std::size_t z_samples, double lambda,
                                     std::uint64_t seed) {
  if (n < 1 || n > 4) {
    throw ValidationError("bound check enumerates every graph; n must be in [1, 4], got " +
                          std::to_string(n));
  }
  if (!(lambda > 0.0)) throw ValidationError("bound check needs lambda > 0");

  const std::size_t pairs = n * (n - 1) / 2;
  const std::uint64_t num_graphs = 1ULL << pairs;
  const double l = static_cast<double>(n + 1);
  const double log_const = 0.5 * l * std::log(2.0 * lambda) - 0.5 * l * std::log(2.0 * std::numbers::pi);
  // Direct normalizer of N(., sigma^2 I) with sigma^2 = 1 / (2 lambda).
  const double sigma2 = 1.0 / (2.0 * lambda);
  const double direct_log_norm = -0.5 * l * std::log(2.0 * std::numbers::pi * sigma2);

  BoundCheckReport report;
  report.n = n;
  report.lambda = lambda;
  report.constant_gap = std::abs(log_const - direct_log_norm);
  report.min_bound_margin = std::numeric_limits<double>::infinity();

  const DegreeHistogramKernel phi{n, 0.1};
  std::vector<Graph> graphs;
  std::vector<std::vector<double>> features;
  for (std::uint64_t bits = 0; bits < num_graphs; ++bits) {
    graphs.push_back(graph_from_mask(n, bits));
    features.push_back(soft_histogram_values(phi, graphs.back().adjacency()));
  }

  ModelConfig cfg;
  cfg.arch.latent_dim = 3;
  cfg.arch.transform_dim = 3;
  cfg.decoder = DecoderType::kSbm;
  cfg.n_max = n;
  cfg.feature_dim = n;
  Rng rng(seed);

  for (std::size_t c = 0; c < z_samples; ++c) {
    GraphVae model(cfg, rng);
    // Wide block matrix so the edge probabilities spread over (0, 1).
    for (double& v : model.parameters().at("dec.lambda").mutable_value().data()) {
      v = 2.0 * rng.normal();
    }
    Matrix z(n, cfg.arch.latent_dim);
    for (double& v : z.data()) v = rng.normal();
    const Tensor recon = model.decode(Tensor::constant(std::move(z)), n);
    const Matrix& p = recon.value();
    const auto phi_recon = soft_histogram_values(phi, p);

    std::vector<double> log_gauss(num_graphs), d2_kernel(num_graphs);
    double normalizer = 0.0;
    for (std::uint64_t g = 0; g < num_graphs; ++g) {
      double lik = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          lik *= graphs[g].has_edge(i, j) ? p(i, j) : 1.0 - p(i, j);
        }
      }
      const double d2_feature = squared_distance(features[g], phi_recon);
      d2_kernel[g] =
          d_squared(phi, Tensor::constant(graphs[g].adjacency()), recon).item();
      report.max_feature_route_gap =
          std::max(report.max_feature_route_gap, std::abs(d2_kernel[g] - d2_feature));
      log_gauss[g] = -lambda * d2_feature + log_const;
      normalizer += lik * std::exp(log_gauss[g]);
    }
    report.max_normalizer = std::max(report.max_normalizer, normalizer);
    const double log_c = std::log(normalizer);
    for (std::uint64_t g = 0; g < num_graphs; ++g) {
      const double lhs = log_gauss[g] - log_c;
      const double rhs = -lambda * d2_kernel[g] + log_const;
      report.min_bound_margin = std::min(report.min_bound_margin, lhs - rhs);
    }
    ++report.configurations;
    report.graphs_enumerated += num_graphs;
  }
  report.normalizer_ok = report.max_normalizer <= 1.0 + 1e-9;
  report.bound_ok = report.min_bound_margin >= -1e-9;
  return report;
}

}  // namespace kgvae
