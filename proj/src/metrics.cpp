#include "kgvae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "kgvae/error.hpp"

namespace kgvae {

std::vector<double> degree_distribution(const Graph& g, std::size_t num_bins) {
  const auto deg = g.degrees();
  std::size_t bins = num_bins;
  for (std::size_t d : deg) bins = std::max(bins, d + 1);
  std::vector<double> hist(std::max<std::size_t>(bins, 1), 0.0);
  if (deg.empty()) return hist;
  for (std::size_t d : deg) hist[d] += 1.0;
  for (double& h : hist) h /= static_cast<double>(deg.size());
  return hist;
}

std::vector<std::size_t> triangle_counts(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> tri(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (g.has_edge(nb[a], nb[b])) ++tri[i];
      }
    }
  }
  return tri;
}

std::vector<double> clustering_coefficients(const Graph& g) {
  const auto tri = triangle_counts(g);
  std::vector<double> c(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto d = static_cast<double>(g.degree(i));
    if (d >= 2.0) c[i] = 2.0 * static_cast<double>(tri[i]) / (d * (d - 1.0));
  }
  return c;
}

std::vector<double> clustering_distribution(const Graph& g) {
  std::vector<double> hist(kClusteringBins, 0.0);
  const auto coeffs = clustering_coefficients(g);
  if (coeffs.empty()) return hist;
  for (double c : coeffs) {
    auto bin = static_cast<std::size_t>(c * static_cast<double>(kClusteringBins));
    hist[std::min(bin, kClusteringBins - 1)] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(coeffs.size());
  return hist;
}

namespace {

// Orbit of each of the 4 positions for every 6-bit edge mask over the pairs
// (0,1) (0,2) (0,3) (1,2) (1,3) (2,3); -1 marks disconnected masks.
struct OrbitTable {
  std::array<std::array<int, 4>, 64> orbit{};

  OrbitTable() {
    constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int mask = 0; mask < 64; ++mask) {
      std::array<int, 4> deg{};
      int edges = 0;
      for (int e = 0; e < 6; ++e) {
        if (mask & (1 << e)) {
          ++deg[kPairs[e][0]];
          ++deg[kPairs[e][1]];
          ++edges;
        }
      }
      // Connectivity by flood fill from position 0.
      int reached = 1;
      for (int round = 0; round < 3; ++round) {
        for (int e = 0; e < 6; ++e) {
          if (!(mask & (1 << e))) continue;
          const int a = 1 << kPairs[e][0], b = 1 << kPairs[e][1];
          if (reached & (a | b)) reached |= a | b;
        }
      }
      auto& o = orbit[mask];
      o.fill(-1);
      if (reached != 0xF) continue;
      const int max_deg = *std::max_element(deg.begin(), deg.end());
      for (int v = 0; v < 4; ++v) {
        switch (edges) {
          case 3:
            o[v] = max_deg == 3 ? (deg[v] == 3 ? 3 : 2) : (deg[v] == 1 ? 0 : 1);
            break;
          case 4:
            o[v] = max_deg == 2 ? 4 : (deg[v] == 1 ? 5 : (deg[v] == 2 ? 6 : 7));
            break;
          case 5:
            o[v] = deg[v] == 2 ? 8 : 9;
            break;
          case 6:
            o[v] = 10;
            break;
          default:
            break;
        }
      }
    }
  }
};

const OrbitTable& orbit_table() {
  static const OrbitTable table;
  return table;
}

void record_quad(const Graph& g, const std::array<std::size_t, 4>& nodes,
                 std::vector<OrbitVector>& counts) {
  constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  int mask = 0;
  for (int e = 0; e < 6; ++e) {
    if (g.has_edge(nodes[kPairs[e][0]], nodes[kPairs[e][1]])) mask |= 1 << e;
  }
  const auto& o = orbit_table().orbit[mask];
  for (int v = 0; v < 4; ++v) ++counts[nodes[v]][static_cast<std::size_t>(o[v])];
}

// ESU enumeration: every connected 4-node set is produced exactly once,
// rooted at its smallest node.
void extend(const Graph& g, const std::vector<std::vector<std::size_t>>& nbrs,
            std::array<std::size_t, 4>& sub, std::size_t size, std::vector<std::size_t> ext,
            std::size_t root, std::vector<OrbitVector>& counts) {
  if (size == 4) {
    record_quad(g, sub, counts);
    return;
  }
  while (!ext.empty()) {
    const std::size_t w = ext.back();
    ext.pop_back();
    std::vector<std::size_t> next_ext = ext;
    for (std::size_t u : nbrs[w]) {
      if (u <= root) continue;
      bool excluded = false;
      for (std::size_t k = 0; k < size && !excluded; ++k) {
        excluded = sub[k] == u || g.has_edge(sub[k], u);
      }
      if (!excluded && std::find(next_ext.begin(), next_ext.end(), u) == next_ext.end()) {
        next_ext.push_back(u);
      }
    }
    sub[size] = w;
    extend(g, nbrs, sub, size + 1, std::move(next_ext), root, counts);
  }
}

}  // namespace

std::vector<OrbitVector> orbit_counts(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<OrbitVector> counts(n, OrbitVector{});
  if (n < 4) return counts;
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t v = 0; v < n; ++v) nbrs[v] = g.neighbors(v);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> ext;
    for (std::size_t u : nbrs[v]) {
      if (u > v) ext.push_back(u);
    }
    std::array<std::size_t, 4> sub{v, 0, 0, 0};
    extend(g, nbrs, sub, 1, std::move(ext), v, counts);
  }
  return counts;
}

std::vector<double> mean_orbit_counts(const Graph& g) {
  std::vector<double> mean(kNumOrbits, 0.0);
  const auto counts = orbit_counts(g);
  if (counts.empty()) return mean;
  for (const auto& c : counts) {
    for (std::size_t o = 0; o < kNumOrbits; ++o) mean[o] += static_cast<double>(c[o]);
  }
  for (double& m : mean) m /= static_cast<double>(counts.size());
  return mean;
}

double sparsity(const Graph& g) {
  const auto n = static_cast<double>(g.num_nodes());
  if (n == 0.0) return 1.0;
  return (n * n - 2.0 * static_cast<double>(g.num_edges())) / (n * n);
}

double wasserstein1(std::span<const double> p, std::span<const double> q, double bin_width) {
  const std::size_t len = std::max(p.size(), q.size());
  double cp = 0.0, cq = 0.0, w = 0.0;
  for (std::size_t k = 0; k + 1 < len; ++k) {
    cp += k < p.size() ? p[k] : 0.0;
    cq += k < q.size() ? q[k] : 0.0;
    w += std::abs(cp - cq);
  }
  return w * bin_width;
}

double euclidean_distance(const Descriptor& a, const Descriptor& b) {
  const std::size_t len = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double d = (k < a.size() ? a[k] : 0.0) - (k < b.size() ? b[k] : 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

double gaussian_mmd(std::span<const Descriptor> s1, std::span<const Descriptor> s2,
                    const DescriptorDistance& distance, double sigma) {
  if (s1.empty() || s2.empty()) throw ValidationError("gaussian_mmd needs non-empty sets");
  if (!(sigma > 0.0)) throw ValidationError("gaussian_mmd needs sigma > 0");
  auto mean_kernel = [&](std::span<const Descriptor> a, std::span<const Descriptor> b) {
    double s = 0.0;
    for (const auto& x : a) {
      for (const auto& y : b) {
        const double d = distance(x, y);
        s += std::exp(-d * d / (2.0 * sigma * sigma));
      }
    }
    return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };
  return mean_kernel(s1, s1) + mean_kernel(s2, s2) - 2.0 * mean_kernel(s1, s2);
}

namespace {

struct DescriptorSets {
  std::vector<Descriptor> degree, clustering, orbit, sparsity;
  double avg_edges = 0.0;
};

DescriptorSets describe_all(std::span<const Graph> graphs) {
  DescriptorSets d;
  for (const auto& g : graphs) {
    d.degree.push_back(degree_distribution(g));
    d.clustering.push_back(clustering_distribution(g));
    d.orbit.push_back(mean_orbit_counts(g));
    d.sparsity.push_back({sparsity(g)});
    d.avg_edges += static_cast<double>(g.num_edges());
  }
  if (!graphs.empty()) d.avg_edges /= static_cast<double>(graphs.size());
  return d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

StructureReport evaluate(std::span<const Graph> generated, std::span<const Graph> test,
                         const EvalOptions& options) {
  if (generated.empty() || test.empty()) {
    throw ValidationError("evaluate needs non-empty generated and test sets");
  }
  const auto gen = describe_all(generated);
  const auto ref = describe_all(test);
  const DescriptorDistance degree_w1 = [](const Descriptor& a, const Descriptor& b) {
    return wasserstein1(a, b, 1.0);
  };
  const DescriptorDistance clustering_w1 = [](const Descriptor& a, const Descriptor& b) {
    return wasserstein1(a, b, 1.0 / static_cast<double>(kClusteringBins));
  };
  const DescriptorDistance scalar_abs = [](const Descriptor& a, const Descriptor& b) {
    return std::abs(a[0] - b[0]);
  };
  StructureReport r;
  r.degree_mmd = gaussian_mmd(gen.degree, ref.degree, degree_w1, options.sigma);
  r.clustering_mmd = gaussian_mmd(gen.clustering, ref.clustering, clustering_w1, options.sigma);
  r.orbit_mmd = gaussian_mmd(gen.orbit, ref.orbit, euclidean_distance, options.sigma);
  r.sparsity_mmd = gaussian_mmd(gen.sparsity, ref.sparsity, scalar_abs, options.sigma);
  r.avg_edges_generated = gen.avg_edges;
  r.avg_edges_test = ref.avg_edges;
  return r;
}

std::string StructureReport::to_json() const {
  nlohmann::json j{{"degree_mmd", degree_mmd},
                   {"clustering_mmd", clustering_mmd},
                   {"orbit_mmd", orbit_mmd},
                   {"sparsity_mmd", sparsity_mmd},
                   {"avg_edges_generated", avg_edges_generated},
                   {"avg_edges_test", avg_edges_test}};
  return j.dump(2);
}

std::string StructureReport::csv_header() {
  return "degree_mmd,clustering_mmd,orbit_mmd,sparsity_mmd,avg_edges_generated,avg_edges_test";
}

std::string StructureReport::csv_row() const {
  return fmt(degree_mmd) + "," + fmt(clustering_mmd) + "," + fmt(orbit_mmd) + "," +
         fmt(sparsity_mmd) + "," + fmt(avg_edges_generated) + "," + fmt(avg_edges_test);
}

void write_plot_data(const std::string& dir, std::span<const Graph> generated,
                     std::span<const Graph> test) {
  std::filesystem::create_directories(dir);
  auto mean_hist = [](std::span<const Graph> graphs, auto&& hist_of, std::size_t len) {
    std::vector<double> mean(len, 0.0);
    for (const auto& g : graphs) {
      const auto h = hist_of(g);
      for (std::size_t k = 0; k < h.size() && k < len; ++k) mean[k] += h[k];
    }
    if (!graphs.empty()) {
      for (double& m : mean) m /= static_cast<double>(graphs.size());
    }
    return mean;
  };
  std::size_t max_deg = 0;
  for (auto set : {generated, test}) {
    for (const auto& g : set) {
      for (std::size_t d : g.degrees()) max_deg = std::max(max_deg, d);
    }
  }
  const auto deg_hist = [](const Graph& g) { return degree_distribution(g); };
  const auto clus_hist = [](const Graph& g) { return clustering_distribution(g); };
  const auto dg = mean_hist(generated, deg_hist, max_deg + 1);
  const auto dt = mean_hist(test, deg_hist, max_deg + 1);
  const auto cg = mean_hist(generated, clus_hist, kClusteringBins);
  const auto ct = mean_hist(test, clus_hist, kClusteringBins);

  std::ofstream deg(std::filesystem::path(dir) / "degree.dat");
  deg << "# degree generated test\n";
  for (std::size_t k = 0; k <= max_deg; ++k) deg << k << ' ' << dg[k] << ' ' << dt[k] << '\n';
  std::ofstream clus(std::filesystem::path(dir) / "clustering.dat");
  clus << "# bin_center generated test\n";
  for (std::size_t k = 0; k < kClusteringBins; ++k) {
    clus << (static_cast<double>(k) + 0.5) / static_cast<double>(kClusteringBins) << ' ' << cg[k]
         << ' ' << ct[k] << '\n';
  }
  std::ofstream gp(std::filesystem::path(dir) / "plot.gp");
  gp << "set terminal svg size 900,400\n"
        "set output 'structure.svg'\n"
        "set multiplot layout 1,2\n"
        "set title 'Degree distribution'\n"
        "plot 'degree.dat' using 1:2 with linespoints title 'generated', \\\n"
        "     'degree.dat' using 1:3 with linespoints title 'test'\n"
        "set title 'Clustering coefficient distribution'\n"
        "plot 'clustering.dat' using 1:2 with lines title 'generated', \\\n"
        "     'clustering.dat' using 1:3 with lines title 'test'\n"
        "unset multiplot\n";
}

}  // namespace kgvae
