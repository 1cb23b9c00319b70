#include <doctest.h>

#include <algorithm>
#include <set>

#include "kgvae/datasets.hpp"
#include "kgvae/error.hpp"
#include "support.hpp"

using namespace kgvae;
using namespace kgvae::testing;

namespace {

bool connected(const Graph& g, const std::vector<bool>& keep) {
  std::size_t start = g.num_nodes(), total = 0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (keep[i]) {
      ++total;
      if (start == g.num_nodes()) start = i;
    }
  }
  if (total == 0) return true;
  std::vector<bool> seen(g.num_nodes(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t u : g.neighbors(v)) {
      if (keep[u] && !seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return reached == total;
}

bool is_tree(const Graph& g) {
  return g.num_edges() + 1 == g.num_nodes() && connected(g, std::vector<bool>(g.num_nodes(), true));
}

// Remove every leaf twice; a lobster must leave a (possibly empty) path.
bool is_lobster(const Graph& g) {
  std::vector<bool> keep(g.num_nodes(), true);
  auto live_degree = [&](std::size_t v) {
    std::size_t d = 0;
    for (std::size_t u : g.neighbors(v)) d += keep[u] ? 1 : 0;
    return d;
  };
  for (int round = 0; round < 2; ++round) {
    std::vector<std::size_t> leaves;
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      if (keep[v] && live_degree(v) <= 1) leaves.push_back(v);
    }
    for (std::size_t v : leaves) keep[v] = false;
  }
  std::size_t nodes = 0, degree_sum = 0;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    if (!keep[v]) continue;
    ++nodes;
    const std::size_t d = live_degree(v);
    if (d > 2) return false;
    degree_sum += d;
  }
  return nodes == 0 || (connected(g, keep) && degree_sum / 2 + 1 == nodes);
}

}  // namespace

TEST_CASE("grid sizes and edge counts") {
  CHECK(make_grid(2, 2).num_edges() == 4);
  const Graph g3 = make_grid(3, 3);
  CHECK(g3.num_nodes() == 9);
  CHECK(g3.num_edges() == 12);
  for (std::size_t r = 2; r <= 7; ++r) {
    for (std::size_t c = 2; c <= 7; ++c) {
      const Graph g = make_grid(r, c);
      CHECK(g.num_edges() == r * (c - 1) + c * (r - 1));
      CHECK(g.degree(0) == 2);
      CHECK(g.degree(r * c - 1) == 2);
      CHECK(g.degree(c - 1) == 2);
    }
  }
  CHECK_THROWS_AS(make_grid(1, 5), ValidationError);
}

TEST_CASE("lobster generator") {
  Rng rng(71);
  const Graph path = make_lobster(6, 0.0, 0.0, rng);
  CHECK(path.num_nodes() == 6);
  CHECK(path.num_edges() == 5);
  CHECK(is_lobster(path));

  for (int t = 0; t < 300; ++t) {
    const Graph g = make_lobster(1 + t % 10, 0.7, 0.7, rng);
    CHECK(is_tree(g));
    CHECK(is_lobster(g));
  }
  CHECK_THROWS_AS(make_lobster(3, 1.0, 0.5, rng), ValidationError);
  CHECK_THROWS_AS(make_lobster(3, 0.5, -0.1, rng), ValidationError);
}

TEST_CASE("the lobster oracle rejects non-lobsters") {
  // a spider with legs of length 3 strips to a star, not a path
  std::vector<Edge> e;
  std::size_t next = 1;
  for (int leg = 0; leg < 3; ++leg) {
    std::size_t prev = 0;
    for (int k = 0; k < 3; ++k) {
      e.emplace_back(prev, next);
      prev = next++;
    }
  }
  CHECK_FALSE(is_lobster(Graph::from_edges(next, e)));
}

TEST_CASE("corpus presets") {
  const auto grid_paper = make_corpus(CorpusKind::kGrid, 100,
                                      CorpusPreset::get(CorpusKind::kGrid, "paper"), 1);
  CHECK(grid_paper.size() == 100);
  for (const auto& g : grid_paper) {
    CHECK(g.num_nodes() >= 100);
    CHECK(g.num_nodes() < 400);
  }

  const auto lob_paper = make_corpus(CorpusKind::kLobster, 100,
                                     CorpusPreset::get(CorpusKind::kLobster, "paper"), 2);
  for (const auto& g : lob_paper) {
    CHECK(g.num_nodes() >= 10);
    CHECK(g.num_nodes() <= 100);
    CHECK(is_lobster(g));
  }

  const auto preset = CorpusPreset::get(CorpusKind::kLobster, "desk");
  const auto desk = make_corpus(CorpusKind::kLobster, 50, preset, 3);
  CHECK(desk.size() == 50);
  for (const auto& g : desk) {
    CHECK(g.num_nodes() >= 8);
    CHECK(g.num_nodes() <= 20);
    CHECK(is_tree(g));
    CHECK(is_lobster(g));
  }
  CHECK(desk == make_corpus(CorpusKind::kLobster, 50, preset, 3));
  CHECK_FALSE(desk == make_corpus(CorpusKind::kLobster, 50, preset, 4));

  const auto grid_desk = make_corpus(CorpusKind::kGrid, 30,
                                     CorpusPreset::get(CorpusKind::kGrid, "desk"), 5);
  for (const auto& g : grid_desk) {
    CHECK(g.num_nodes() >= 9);
    CHECK(g.num_nodes() <= 25);
  }

  CorpusPreset impossible = preset;
  impossible.min_nodes = 50;
  impossible.max_nodes = 10;
  CHECK_THROWS_AS(make_corpus(CorpusKind::kLobster, 5, impossible, 1), ValidationError);
  CHECK_THROWS_AS(CorpusPreset::get(CorpusKind::kGrid, "huge"), ValidationError);
}

TEST_CASE("split") {
  std::vector<Graph> graphs;
  for (std::size_t n = 1; n <= 100; ++n) graphs.push_back(Graph(n));
  const auto [train, test] = split(graphs, 0.8, 9);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);
  std::multiset<std::size_t> seen;
  for (const auto& g : train) seen.insert(g.num_nodes());
  for (const auto& g : test) seen.insert(g.num_nodes());
  CHECK(seen.size() == 100);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 100);

  const auto again = split(graphs, 0.8, 9);
  CHECK(again.first == train);

  std::vector<Graph> ten(graphs.begin(), graphs.begin() + 10);
  const auto small = split(ten, 0.8, 1);
  CHECK(small.first.size() == 8);
  CHECK(small.second.size() == 2);

  CHECK_THROWS_AS(split({Graph(3)}, 0.8, 1), ValidationError);
}
