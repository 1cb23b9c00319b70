#include "kgvae/datasets.hpp"

#include <cmath>

#include "kgvae/error.hpp"

namespace kgvae {

Graph make_grid(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) {
    throw ValidationError("grid needs rows, cols >= 2, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return Graph::from_edges(rows * cols, edges);
}

Graph make_lobster(std::size_t backbone_len, double p1, double p2, Rng& rng) {
  if (backbone_len < 1) throw ValidationError("lobster backbone needs at least one node");
  if (!(p1 >= 0.0 && p1 < 1.0) || !(p2 >= 0.0 && p2 < 1.0)) {
    throw ValidationError("lobster attachment probabilities must lie in [0, 1)");
  }
  std::vector<Edge> edges;
  for (std::size_t v = 0; v + 1 < backbone_len; ++v) edges.emplace_back(v, v + 1);
  std::size_t next = backbone_len;
  for (std::size_t v = 0; v < backbone_len; ++v) {
    while (rng.uniform() < p1) {
      const std::size_t pendant = next++;
      edges.emplace_back(v, pendant);
      while (rng.uniform() < p2) edges.emplace_back(pendant, next++);
    }
  }
  return Graph::from_edges(next, edges);
}

CorpusKind corpus_kind_from_string(const std::string& s) {
  if (s == "grid") return CorpusKind::kGrid;
  if (s == "lobster") return CorpusKind::kLobster;
  throw ValidationError("unknown corpus kind '" + s + "' (expected grid or lobster)");
}

std::string to_string(CorpusKind k) { return k == CorpusKind::kGrid ? "grid" : "lobster"; }

CorpusPreset CorpusPreset::get(CorpusKind kind, const std::string& preset) {
  CorpusPreset p;
  if (kind == CorpusKind::kGrid) {
    if (preset == "paper") {
      p.min_nodes = 100;
      p.max_nodes = 399;
      p.min_side = 10;
      p.max_side = 19;
    } else if (preset == "desk") {
      p.min_nodes = 9;
      p.max_nodes = 25;
      p.min_side = 3;
      p.max_side = 5;
    } else {
      throw ValidationError("unknown corpus preset '" + preset + "'");
    }
  } else {
    if (preset == "paper") {
      p.min_nodes = 10;
      p.max_nodes = 100;
      p.min_backbone = 1;
      p.max_backbone = 12;
    } else if (preset == "desk") {
      p.min_nodes = 8;
      p.max_nodes = 20;
      p.min_backbone = 1;
      p.max_backbone = 3;
    } else {
      throw ValidationError("unknown corpus preset '" + preset + "'");
    }
  }
  return p;
}

std::vector<Graph> make_corpus(CorpusKind kind, std::size_t count, const CorpusPreset& preset,
                               std::uint64_t seed) {
  Rng rng = make_stream(seed, Stream::kCorpus);
  std::vector<Graph> out;
  out.reserve(count);
  if (kind == CorpusKind::kGrid) {
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t r = std::max<std::size_t>(2, preset.min_side); r <= preset.max_side; ++r) {
      for (std::size_t c = std::max<std::size_t>(2, preset.min_side); c <= preset.max_side; ++c) {
        if (r * c >= preset.min_nodes && r * c <= preset.max_nodes) shapes.emplace_back(r, c);
      }
    }
    if (shapes.empty()) throw ValidationError("no admissible grid shapes for the size range");
    for (std::size_t k = 0; k < count; ++k) {
      const auto idx = rng.uniform_int(0, static_cast<std::int64_t>(shapes.size()) - 1);
      out.push_back(make_grid(shapes[idx].first, shapes[idx].second));
    }
    return out;
  }

  if (preset.min_backbone < 1 || preset.max_backbone < preset.min_backbone ||
      preset.min_backbone > preset.max_nodes || preset.min_nodes > preset.max_nodes) {
    throw ValidationError("no admissible lobster parameters for the size range");
  }
  constexpr std::size_t kMaxAttempts = 1000000;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > kMaxAttempts) {
      throw ValidationError("lobster rejection sampling found too few graphs in range");
    }
    const auto len = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(preset.min_backbone),
                        static_cast<std::int64_t>(preset.max_backbone)));
    Graph g = make_lobster(len, preset.p1, preset.p2, rng);
    if (g.num_nodes() >= preset.min_nodes && g.num_nodes() <= preset.max_nodes) {
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::pair<std::vector<Graph>, std::vector<Graph>> split(std::vector<Graph> graphs,
                                                        double train_frac, std::uint64_t seed) {
  const std::size_t n = graphs.size();
  if (n < 2) throw ValidationError("split needs at least 2 graphs, got " + std::to_string(n));
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  Rng rng = make_stream(seed, Stream::kSplit);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
    std::swap(graphs[i], graphs[j]);
  }
  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<Graph> test(std::make_move_iterator(graphs.begin() + static_cast<std::ptrdiff_t>(n_train)),
                          std::make_move_iterator(graphs.end()));
  graphs.resize(n_train);
  return {std::move(graphs), std::move(test)};
}

}  // namespace kgvae
