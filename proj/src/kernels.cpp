#include "kgvae/kernels.hpp"

#include <cmath>
#include <numbers>

#include "kgvae/error.hpp"

namespace kgvae {

namespace {

Tensor ones(std::size_t rows, std::size_t cols) { return Tensor::constant(Matrix(rows, cols, 1.0)); }

void require_square(const char* what, const Tensor& pa) {
  if (pa.rows() != pa.cols()) {
    throw ShapeError(std::string(what) + ": adjacency must be square, got " + pa.shape().str());
  }
}

Tensor one_step_transition(double degree_floor, const Tensor& pa) {
  const std::size_t n = pa.rows();
  Tensor deg = row_sum(pa);
  Matrix keep(n, 1), drop(n, 1), self_loops(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool isolated = deg.value()(i, 0) < degree_floor;
    keep(i, 0) = isolated ? 0.0 : 1.0;
    drop(i, 0) = isolated ? 1.0 : 0.0;
    self_loops(i, i) = isolated ? 1.0 : 0.0;
  }
  const Tensor keep_t = Tensor::constant(std::move(keep));
  // Isolated rows divide by 1 and are then zeroed, so they carry no gradient.
  Tensor safe_deg = add(mul(deg, keep_t), Tensor::constant(std::move(drop)));
  Tensor inv = mul(reciprocal(safe_deg), keep_t);
  Tensor p = mul(matmul(inv, ones(1, n)), pa);
  return add(p, Tensor::constant(std::move(self_loops)));
}

// P^1 .. P^max_steps of one adjacency.
std::vector<Tensor> transition_powers(double degree_floor, const Tensor& pa, int max_steps) {
  std::vector<Tensor> powers;
  powers.push_back(one_step_transition(degree_floor, pa));
  for (int s = 2; s <= max_steps; ++s) powers.push_back(matmul(powers.back(), powers.front()));
  return powers;
}

Tensor three_term(const Tensor& kxx, const Tensor& kyy, const Tensor& kxy) {
  return sub(add(kxx, kyy), scale(kxy, 2.0));
}

}  // namespace

void KernelSet::validate() const {
  for (const auto& wk : kernels) {
    if (!(wk.weight >= 0.0) || !std::isfinite(wk.weight)) {
      throw ValidationError("kernel weight must be finite and non-negative");
    }
    if (const auto* t = std::get_if<TransitionKernel>(&wk.kernel); t && t->steps < 1) {
      throw ValidationError("transition kernel needs steps >= 1");
    }
  }
}

std::string describe(const GraphKernel& k) {
  if (const auto* d = std::get_if<DegreeHistogramKernel>(&k)) {
    return "degree(B=" + std::to_string(d->max_degree_bin) + ")";
  }
  return "transition(s=" + std::to_string(std::get<TransitionKernel>(k).steps) + ")";
}

Tensor soft_histogram(const DegreeHistogramKernel& k, const Tensor& pa) {
  require_square("soft_histogram", pa);
  const std::size_t n = pa.rows();
  const std::size_t bins = k.max_degree_bin + 1;
  if (n > k.max_degree_bin) {
    throw ValidationError("degree histogram with B=" + std::to_string(k.max_degree_bin) +
                          " cannot hold a graph on " + std::to_string(n) + " nodes");
  }
  Matrix centers(n, bins);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < bins; ++b) centers(i, b) = static_cast<double>(b);
  }
  Tensor spread = matmul(row_sum(pa), ones(1, bins));
  Tensor dist = abs(sub(spread, Tensor::constant(std::move(centers))));
  Tensor membership = relu(add_scalar(scale(dist, -k.slope), 1.0));
  return matmul(ones(1, n), membership);
}

std::vector<double> soft_histogram_values(const DegreeHistogramKernel& k, const Matrix& pa) {
  const std::size_t n = pa.rows();
  if (n > k.max_degree_bin) {
    throw ValidationError("degree histogram too small for graph on " + std::to_string(n) +
                          " nodes");
  }
  std::vector<double> hist(k.max_degree_bin + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += pa(i, j);
    for (std::size_t b = 0; b < hist.size(); ++b) {
      hist[b] += std::max(0.0, 1.0 - k.slope * std::abs(d - static_cast<double>(b)));
    }
  }
  return hist;
}

Tensor degree_kernel(const DegreeHistogramKernel& k, const Tensor& pa1, const Tensor& pa2) {
  return sum(mul(soft_histogram(k, pa1), soft_histogram(k, pa2)));
}

Tensor transition_matrix(const TransitionKernel& k, const Tensor& pa) {
  require_square("transition_matrix", pa);
  if (k.steps < 1) throw ValidationError("transition kernel needs steps >= 1");
  return transition_powers(k.degree_floor, pa, k.steps).back();
}

Tensor pad_isolated(const Tensor& pa, std::size_t m) {
  const std::size_t n = pa.rows();
  if (n == m) return pa;
  if (n > m) throw ShapeError("pad_isolated: cannot shrink " + pa.shape().str());
  Matrix embed(m, n);
  for (std::size_t i = 0; i < n; ++i) embed(i, i) = 1.0;
  const Tensor e = Tensor::constant(embed);
  return matmul(matmul(e, pa), transpose(e));
}

Tensor transition_kernel(const TransitionKernel& k, const Tensor& pa1, const Tensor& pa2) {
  const std::size_t m = std::max(pa1.rows(), pa2.rows());
  return sum(mul(transition_matrix(k, pad_isolated(pa1, m)),
                 transition_matrix(k, pad_isolated(pa2, m))));
}

Tensor kernel_value(const GraphKernel& k, const Tensor& pa1, const Tensor& pa2) {
  return std::visit(
      [&](const auto& kernel) -> Tensor {
        using K = std::decay_t<decltype(kernel)>;
        if constexpr (std::is_same_v<K, DegreeHistogramKernel>) {
          return degree_kernel(kernel, pa1, pa2);
        } else {
          return transition_kernel(kernel, pa1, pa2);
        }
      },
      k);
}

Tensor d_squared(const GraphKernel& k, const Tensor& pa1, const Tensor& pa2) {
  if (std::holds_alternative<TransitionKernel>(k)) {
    // All three terms must see the same padded graphs, otherwise the
    // self-kernels miss the identity rows the cross term gains.
    const std::size_t m = std::max(pa1.rows(), pa2.rows());
    const Tensor x = pad_isolated(pa1, m);
    const Tensor y = pad_isolated(pa2, m);
    return three_term(kernel_value(k, x, x), kernel_value(k, y, y), kernel_value(k, x, y));
  }
  return three_term(kernel_value(k, pa1, pa1), kernel_value(k, pa2, pa2),
                    kernel_value(k, pa1, pa2));
}

Tensor regularizer(const KernelSet& ks, const Graph& a, const Tensor& pa) {
  Tensor total = Tensor::scalar(0.0);
  if (ks.empty()) return total;
  require_square("regularizer", pa);
  const std::size_t m = std::max(a.num_nodes(), pa.rows());
  const Tensor target = pad_isolated(Tensor::constant(a.adjacency()), m);
  const Tensor recon = pad_isolated(pa, m);

  // Transition powers are shared by every kernel with the same floor.
  struct PowerCache {
    double floor;
    std::vector<Tensor> target, recon;
  };
  std::vector<PowerCache> caches;
  int max_steps = 0;
  for (const auto& wk : ks.kernels) {
    if (const auto* t = std::get_if<TransitionKernel>(&wk.kernel)) {
      max_steps = std::max(max_steps, t->steps);
    }
  }
  auto powers_for = [&](const TransitionKernel& t) -> PowerCache& {
    for (auto& c : caches) {
      if (c.floor == t.degree_floor) return c;
    }
    caches.push_back({t.degree_floor, transition_powers(t.degree_floor, target, max_steps),
                      transition_powers(t.degree_floor, recon, max_steps)});
    return caches.back();
  };

  for (const auto& wk : ks.kernels) {
    Tensor d2;
    if (const auto* dk = std::get_if<DegreeHistogramKernel>(&wk.kernel)) {
      // Histograms need no padding; isolated filler nodes would add bin-0 mass.
      const Tensor h_target = soft_histogram(*dk, Tensor::constant(a.adjacency()));
      const Tensor h_recon = soft_histogram(*dk, pa);
      d2 = three_term(sum(mul(h_target, h_target)), sum(mul(h_recon, h_recon)),
                      sum(mul(h_target, h_recon)));
    } else {
      const auto& tk = std::get<TransitionKernel>(wk.kernel);
      if (tk.steps < 1) throw ValidationError("transition kernel needs steps >= 1");
      PowerCache& c = powers_for(tk);
      const Tensor& pt = c.target[tk.steps - 1];
      const Tensor& pr = c.recon[tk.steps - 1];
      d2 = three_term(sum(mul(pt, pt)), sum(mul(pr, pr)), sum(mul(pt, pr)));
    }
    total = add(total, scale(d2, wk.weight));
  }
  return total;
}

KernelSet make_kernel_set(const std::vector<KernelSpec>& specs, std::size_t n_max) {
  KernelSet ks;
  for (const auto& s : specs) {
    if (s.type == KernelSpec::Type::kDegree) {
      ks.kernels.push_back({DegreeHistogramKernel{n_max, 0.1}, s.lambda});
    } else {
      ks.kernels.push_back({TransitionKernel{s.steps, 1e-8}, s.lambda});
    }
  }
  ks.validate();
  return ks;
}

std::vector<KernelSpec> default_kernel_specs(const std::string& dataset, double lambda_scale) {
  double transition = 0.0, degree = 0.0;
  if (dataset == "grid" || dataset == "lobster") {
    transition = std::exp(2.0);
    degree = std::exp(-4.0);
  } else if (dataset == "protein") {
    transition = std::exp(3.0);
    degree = 2.0 * std::exp(-5.0);
  } else {
    throw ValidationError("no default kernel weights for dataset '" + dataset + "'");
  }
  std::vector<KernelSpec> specs;
  for (int s = 1; s <= 5; ++s) {
    specs.push_back({KernelSpec::Type::kTransition, s, transition * lambda_scale});
  }
  specs.push_back({KernelSpec::Type::kDegree, 1, degree * lambda_scale});
  return specs;
}

}  // namespace kgvae
