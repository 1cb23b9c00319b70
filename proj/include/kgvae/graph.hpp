#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgvae/matrix.hpp"

namespace kgvae {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph: symmetric 0/1 adjacency with zero diagonal and
/// optional n x d node features.
class Graph {
 public:
  Graph() = default;

  /// Empty graph on `n` nodes.
  explicit Graph(std::size_t n);

  /// Builds from an edge list; each pair may appear in either orientation.
  /// Throws ValidationError on out-of-range indices or self-loops.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          std::optional<Matrix> features = std::nullopt);

  /// Builds from a dense n x n 0/1 matrix. Only the strict upper triangle is
  /// read; it is mirrored to the lower triangle and the diagonal is zeroed.
  static Graph from_adjacency(const Matrix& adjacency,
                              std::optional<Matrix> features = std::nullopt);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return num_edges_; }

  bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  std::size_t degree(std::size_t i) const;
  std::vector<std::size_t> degrees() const;

  /// Neighbours of `i` in increasing order.
  std::vector<std::size_t> neighbors(std::size_t i) const;

  /// Upper-triangular edge list (i < j), lexicographically ordered.
  std::vector<Edge> edges() const;

  /// Adjacency as a dense 0/1 matrix.
  Matrix adjacency() const;

  const std::optional<Matrix>& features() const { return features_; }

  bool operator==(const Graph& other) const;

 private:
  std::size_t n_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<std::uint8_t> adj_;
  std::optional<Matrix> features_;

  void set_features(std::optional<Matrix> features);
};

/// Symmetric matrix of edge probabilities in [0, 1] with zero diagonal.
class ProbAdjacency {
 public:
  /// Entries outside [0, 1] by more than 1e-12 are rejected; the rest are
  /// clamped. The strict upper triangle is mirrored and the diagonal zeroed.
  explicit ProbAdjacency(const Matrix& probs);

  static ProbAdjacency from_graph(const Graph& g);

  std::size_t num_nodes() const { return probs_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return probs_(i, j); }
  const Matrix& probs() const { return probs_; }

 private:
  Matrix probs_;
};

/// Draws each upper-triangular edge as an independent Bernoulli(p_ij).
Graph sample_adjacency(const ProbAdjacency& pa, std::uint64_t seed);

/// Row sums of the probability matrix (expected node degrees).
std::vector<double> soft_degrees(const ProbAdjacency& pa);

/// Relabels node i as perm[i], i.e. A' = P A P^T. Throws ValidationError if
/// `perm` is not a bijection on 0..n-1.
Graph permute(const Graph& g, std::span<const std::size_t> perm);

/// Inverse of a permutation (assumed valid).
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

/// Graphs zero-padded to a common size with per-graph node masks.
struct PaddedBatch {
  std::vector<Graph> graphs;
  std::size_t n_max = 0;
  std::vector<std::vector<bool>> masks;

  /// n_max x n_max adjacency of graph k with the real graph in the top-left block.
  Matrix padded_adjacency(std::size_t k) const;
};

/// Pads to the largest node count, or to `n_max` when that is larger.
/// Throws ValidationError on an empty list or a graph exceeding `n_max`.
PaddedBatch pad_batch(std::vector<Graph> graphs, std::size_t n_max = 0);

// JSON-lines serialization: one graph per line,
//   {"n": <int>, "edges": [[i,j], ...], "features": [[...], ...] | null}
// with 0-based indices, i < j, each undirected edge listed once.

std::string to_json_line(const Graph& g);
Graph graph_from_json_line(const std::string& line);

/// Reads a JSONL corpus. Blank lines are skipped; malformed or invalid lines
/// throw ParseError / ValidationError carrying the 1-based line number.
std::vector<Graph> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::filesystem::path& path, std::span<const Graph> graphs);

}  // namespace kgvae
