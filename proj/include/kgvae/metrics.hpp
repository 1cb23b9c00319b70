#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kgvae/graph.hpp"

namespace kgvae {

/// Normalized degree histogram over bins 0..max(num_bins-1, max degree).
std::vector<double> degree_distribution(const Graph& g, std::size_t num_bins = 0);

/// Local clustering coefficient per node; 0 for degree < 2.
std::vector<double> clustering_coefficients(const Graph& g);

inline constexpr std::size_t kClusteringBins = 100;

/// Clustering coefficients binned into 100 uniform bins over [0, 1]
/// (1.0 falls in the last bin), normalized to sum to one.
std::vector<double> clustering_distribution(const Graph& g);

/// Number of triangles each node belongs to.
std::vector<std::size_t> triangle_counts(const Graph& g);

/// The 11 node orbits of the connected 4-node graphlets:
///   0 path end, 1 path middle, 2 star leaf, 3 star centre, 4 cycle,
///   5 tailed-triangle tail, 6 tailed-triangle degree-2 node,
///   7 tailed-triangle degree-3 node, 8 diamond degree-2 node,
///   9 diamond degree-3 node, 10 clique.
inline constexpr std::size_t kNumOrbits = 11;
using OrbitVector = std::array<std::uint64_t, kNumOrbits>;

/// Per-node orbit participation counts, from an enumeration of connected
/// 4-node induced subgraphs that grows each subgraph from its smallest node.
std::vector<OrbitVector> orbit_counts(const Graph& g);

/// Mean orbit-count vector over nodes (zero for an empty graph).
std::vector<double> mean_orbit_counts(const Graph& g);

/// Fraction of zero entries in the full n x n adjacency: (n^2 - 2|E|) / n^2.
double sparsity(const Graph& g);

/// First Wasserstein distance between two histograms on a shared ordered
/// support with uniform spacing `bin_width`; shorter inputs are zero-padded.
double wasserstein1(std::span<const double> p, std::span<const double> q, double bin_width = 1.0);

using Descriptor = std::vector<double>;
using DescriptorDistance = std::function<double(const Descriptor&, const Descriptor&)>;

/// k(S,S) + k(S',S') - 2 k(S,S') with k the mean pairwise Gaussian kernel
/// exp(-d(x, y)^2 / (2 sigma^2)) over all pairs (diagonal included).
/// Throws ValidationError when either set is empty.
double gaussian_mmd(std::span<const Descriptor> s1, std::span<const Descriptor> s2,
                    const DescriptorDistance& distance, double sigma = 1.0);

double euclidean_distance(const Descriptor& a, const Descriptor& b);

struct StructureReport {
  double degree_mmd = 0.0;
  double clustering_mmd = 0.0;
  double orbit_mmd = 0.0;
  double sparsity_mmd = 0.0;
  double avg_edges_generated = 0.0;
  double avg_edges_test = 0.0;

  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

struct EvalOptions {
  double sigma = 1.0;
};

/// Compares a generated set against a test set on all four descriptors.
/// Degree W1 is measured in degree units; clustering W1 in coefficient units
/// (bin width 0.01); orbits by Euclidean distance between mean vectors;
/// sparsity by absolute difference.
StructureReport evaluate(std::span<const Graph> generated, std::span<const Graph> test,
                         const EvalOptions& options = {});

/// Writes gnuplot-ready data (degree.dat, clustering.dat) with the mean
/// generated and test histograms side by side, plus a plot.gp script.
void write_plot_data(const std::string& dir, std::span<const Graph> generated,
                     std::span<const Graph> test);

}  // namespace kgvae
