#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgvae/graph.hpp"
#include "kgvae/rng.hpp"

namespace kgvae {

/// rows x cols lattice; node (r, c) has index r * cols + c.
Graph make_grid(std::size_t rows, std::size_t cols);

/// Random lobster: a path of `backbone_len` nodes; each backbone node keeps
/// gaining pendants while a uniform draw is below p1, and each new pendant
/// immediately keeps gaining second-level pendants while a draw is below p2.
/// Requires p1, p2 in [0, 1).
Graph make_lobster(std::size_t backbone_len, double p1, double p2, Rng& rng);

enum class CorpusKind { kGrid, kLobster };

CorpusKind corpus_kind_from_string(const std::string& s);
std::string to_string(CorpusKind k);

/// Size ranges and generator parameters for one corpus kind.
struct CorpusPreset {
  std::size_t min_nodes = 0;
  std::size_t max_nodes = 0;  // inclusive
  // grid: admissible side lengths
  std::size_t min_side = 2;
  std::size_t max_side = 2;
  // lobster: backbone length range and attachment probabilities
  std::size_t min_backbone = 1;
  std::size_t max_backbone = 1;
  double p1 = 0.7;
  double p2 = 0.7;

  /// "paper": grid 100 <= |V| < 400 (sides 10..19), lobster 10 <= |V| <= 100.
  /// "desk":  grid sides 3..5, lobster 8 <= |V| <= 20.
  static CorpusPreset get(CorpusKind kind, const std::string& preset);
};

/// `count` graphs. Grids draw (rows, cols) uniformly from the admissible
/// pairs; lobsters draw a backbone length uniformly and reject samples
/// outside the node range. Throws ValidationError when nothing is admissible.
std::vector<Graph> make_corpus(CorpusKind kind, std::size_t count, const CorpusPreset& preset,
                               std::uint64_t seed);

/// Seeded shuffle, then the first round(train_frac * N) graphs (kept within
/// [1, N-1]) form the training split.
std::pair<std::vector<Graph>, std::vector<Graph>> split(std::vector<Graph> graphs,
                                                        double train_frac, std::uint64_t seed);

}  // namespace kgvae
