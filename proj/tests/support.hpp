#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check beyond building the scalar being differentiated.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kgvae/graph.hpp"
#include "kgvae/metrics.hpp"
#include "kgvae/rng.hpp"
#include "kgvae/tensor.hpp"

namespace kgvae::testing {

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -2.0,
                            double hi = 2.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = lo + (hi - lo) * rng.uniform();
  return m;
}

/// Symmetric matrix with entries in (lo, hi) and zero diagonal.
inline Matrix random_soft_adjacency(Rng& rng, std::size_t n, double lo = 0.05, double hi = 0.95) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

inline Graph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p[i - 1], p[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }
  return p;
}

/// Central finite-difference gradient of a scalar function with respect to
/// the entries of `param`, perturbing its value in place.
inline Matrix numeric_gradient(const std::function<double()>& f, Tensor& param, double h = 1e-5) {
  Matrix g(param.rows(), param.cols());
  auto& w = param.mutable_value().data();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double saved = w[k];
    w[k] = saved + h;
    const double up = f();
    w[k] = saved - h;
    const double down = f();
    w[k] = saved;
    g.data()[k] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / (||a|| + ||b||), with 0 when both vanish.
inline double relative_error(const Matrix& a, const Matrix& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a.data()[k] - b.data()[k]) * (a.data()[k] - b.data()[k]);
    na += a.data()[k] * a.data()[k];
    nb += b.data()[k] * b.data()[k];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

/// Largest relative error between analytic and numeric gradients over all
/// `params`, for the scalar built by `build`.
inline double max_gradient_error(const std::function<Tensor()>& build, std::vector<Tensor> params,
                                 double h = 1e-5) {
  for (auto& p : params) p.zero_grad();
  backward(build());
  double worst = 0.0;
  for (auto& p : params) {
    const Matrix analytic = p.has_grad() ? p.grad() : Matrix(p.rows(), p.cols());
    const Matrix numeric = numeric_gradient([&] { return build().item(); }, p, h);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

// Classifies every 4-node subset by its induced edge count and each member's
// induced degree. Connected iff no member has induced degree zero (with at
// least three edges among four nodes).
inline std::vector<OrbitVector> orbit_oracle(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<OrbitVector> out(n, OrbitVector{});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d) {
          const std::size_t v[4] = {a, b, c, d};
          int deg[4] = {0, 0, 0, 0};
          int edges = 0;
          for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y)
              if (g.has_edge(v[x], v[y])) {
                ++deg[x];
                ++deg[y];
                ++edges;
              }
          if (edges < 3 || *std::min_element(deg, deg + 4) == 0) continue;
          const int max_deg = *std::max_element(deg, deg + 4);
          for (int x = 0; x < 4; ++x) {
            std::size_t orbit = 0;
            switch (edges) {
              case 3:
                orbit = max_deg == 3 ? (deg[x] == 3 ? 3 : 2) : (deg[x] == 1 ? 0 : 1);
                break;
              case 4:
                orbit = max_deg == 2 ? 4 : (deg[x] == 1 ? 5 : deg[x] == 2 ? 6 : 7);
                break;
              case 5:
                orbit = deg[x] == 2 ? 8 : 9;
                break;
              default:
                orbit = 10;
            }
            ++out[v[x]][orbit];
          }
        }
  return out;
}

}  // namespace kgvae::testing
