#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "kgvae/error.hpp"
#include "kgvae/graph.hpp"
#include "support.hpp"

using namespace kgvae;
using namespace kgvae::testing;

namespace {

Graph path3() {
  const std::vector<Edge> e = {{0, 1}, {1, 2}};
  return Graph::from_edges(3, e);
}

Graph triangle() {
  const std::vector<Edge> e = {{0, 1}, {1, 2}, {0, 2}};
  return Graph::from_edges(3, e);
}

}  // namespace

TEST_CASE("graph construction enforces a simple undirected graph") {
  const std::vector<Edge> loop = {{1, 1}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), ValidationError);
  const std::vector<Edge> out = {{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, out), ValidationError);

  Matrix m(3, 3);
  m(0, 1) = 1;  // lower triangle ignored, mirrored from upper
  m(2, 2) = 1;
  const Graph g = Graph::from_adjacency(m);
  CHECK(g.has_edge(1, 0));
  CHECK(g.num_edges() == 1);
  CHECK_FALSE(g.has_edge(2, 2));

  CHECK_THROWS_AS(Graph::from_edges(2, std::vector<Edge>{{0, 1}}, Matrix(3, 1)), ValidationError);
}

TEST_CASE("sample_adjacency degenerate probabilities") {
  Matrix ones(3, 3, 1.0);
  const Graph full = sample_adjacency(ProbAdjacency(ones), 1);
  CHECK(full.num_edges() == 3);
  const Graph empty = sample_adjacency(ProbAdjacency(Matrix(3, 3)), 1);
  CHECK(empty.num_edges() == 0);
}

TEST_CASE("sample_adjacency edge frequency matches the Bernoulli mean") {
  Matrix p(2, 2);
  p(0, 1) = 0.5;
  const ProbAdjacency pa(p);
  int hits = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) hits += sample_adjacency(pa, s).num_edges();
  CHECK(std::abs(hits / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("sample_adjacency is deterministic and always valid") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const ProbAdjacency pa(random_soft_adjacency(rng, 7, 0.0, 1.0));
    const Graph a = sample_adjacency(pa, 1000 + t);
    CHECK(a == sample_adjacency(pa, 1000 + t));
    const Matrix adj = a.adjacency();
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(adj(i, i) == 0.0);
      for (std::size_t j = 0; j < 7; ++j) {
        CHECK(adj(i, j) == adj(j, i));
        CHECK((adj(i, j) == 0.0 || adj(i, j) == 1.0));
      }
    }
  }
}

TEST_CASE("ProbAdjacency rejects out-of-range entries") {
  Matrix bad(2, 2);
  bad(0, 1) = 1.5;
  CHECK_THROWS_AS(ProbAdjacency{bad}, ValidationError);
  Matrix edge(2, 2);
  edge(0, 1) = 1.0 + 1e-13;
  CHECK(ProbAdjacency(edge)(0, 1) == 1.0);
}

TEST_CASE("soft_degrees") {
  const auto tri = soft_degrees(ProbAdjacency::from_graph(triangle()));
  CHECK(tri == std::vector<double>{2, 2, 2});

  Matrix p(2, 2);
  p(0, 1) = 0.3;
  CHECK(soft_degrees(ProbAdjacency(p)) == std::vector<double>{0.3, 0.3});
  CHECK(soft_degrees(ProbAdjacency(Matrix(4, 4))) == std::vector<double>(4, 0.0));

  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = random_soft_adjacency(rng, 6);
    double upper = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) upper += m(i, j);
    }
    const auto d = soft_degrees(ProbAdjacency(m));
    double total = 0.0;
    for (double v : d) total += v;
    CHECK(std::abs(total - 2.0 * upper) < 1e-9);

    const Graph g = random_graph(rng, 8, 0.4);
    const auto sd = soft_degrees(ProbAdjacency::from_graph(g));
    for (std::size_t i = 0; i < 8; ++i) CHECK(sd[i] == static_cast<double>(g.degree(i)));
  }
}

TEST_CASE("permute") {
  const Graph p = path3();
  const std::vector<std::size_t> id = {0, 1, 2};
  CHECK(permute(p, id) == p);

  const std::vector<std::size_t> rev = {2, 1, 0};
  const Graph r = permute(p, rev);
  CHECK(r.has_edge(2, 1));
  CHECK(r.has_edge(1, 0));
  CHECK(r.num_edges() == 2);

  const std::vector<std::size_t> bad = {0, 0, 1};
  CHECK_THROWS_AS(permute(p, bad), ValidationError);
  const std::vector<std::size_t> short_perm = {0, 1};
  CHECK_THROWS_AS(permute(p, short_perm), ValidationError);

  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const Graph bare = random_graph(rng, 9, 0.3);
    const Graph g = Graph::from_edges(9, bare.edges(), random_matrix(rng, 9, 2));
    const auto perm = random_permutation(rng, 9);
    const Graph h = permute(g, perm);
    auto dg = g.degrees(), dh = h.degrees();
    std::sort(dg.begin(), dg.end());
    std::sort(dh.begin(), dh.end());
    CHECK(dg == dh);
    // node i of g lands at perm[i] in h, features included
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK((*h.features())(perm[i], 1) == (*g.features())(i, 1));
      for (std::size_t j = 0; j < 9; ++j) CHECK(h.has_edge(perm[i], perm[j]) == g.has_edge(i, j));
    }
    CHECK(permute(h, inverse_permutation(perm)) == g);
  }
}

TEST_CASE("pad_batch") {
  CHECK_THROWS_AS(pad_batch({}), ValidationError);

  const PaddedBatch single = pad_batch({Graph(5)});
  CHECK(single.n_max == 5);
  CHECK(single.masks[0] == std::vector<bool>(5, true));

  const PaddedBatch two = pad_batch({triangle(), Graph(5)});
  CHECK(two.n_max == 5);
  CHECK(two.masks[0] == std::vector<bool>{true, true, true, false, false});
  const Matrix a = two.padded_adjacency(0);
  CHECK(a(0, 1) == 1.0);
  for (std::size_t i = 3; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(a(i, j) == 0.0);
  }
  CHECK_THROWS_AS(pad_batch({Graph(5)}, 4), ValidationError);
}

TEST_CASE("jsonl parsing and round trip") {
  const Graph g = graph_from_json_line(R"({"n":2,"edges":[[0,1]]})");
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_edges() == 1);
  CHECK_FALSE(g.features().has_value());
  CHECK_THROWS_AS(graph_from_json_line(R"({"n":2,"edges":[[0,2]]})"), ValidationError);

  Rng rng(21);
  std::vector<Graph> graphs;
  for (int t = 0; t < 10; ++t) graphs.push_back(random_graph(rng, 3 + t, 0.3));
  graphs[2] = Graph::from_edges(graphs[2].num_nodes(), graphs[2].edges(),
                               random_matrix(rng, graphs[2].num_nodes(), 3));
  const auto path = std::filesystem::temp_directory_path() / "kgvae_graph_roundtrip.jsonl";
  save_jsonl(path, graphs);
  CHECK(load_jsonl(path) == graphs);

  {
    std::ofstream out(path);
    out << R"({"n":2,"edges":[[0,1]]})" << "\n" << "{not json\n";
  }
  try {
    load_jsonl(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  std::filesystem::remove(path);
}
