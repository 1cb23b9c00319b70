#include "kgvae/graph.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "kgvae/error.hpp"
#include "kgvae/rng.hpp"

namespace kgvae {

using json = nlohmann::json;

Graph::Graph(std::size_t n) : n_(n), adj_(n * n, 0) {}

void Graph::set_features(std::optional<Matrix> features) {
  if (features && features->rows() != n_) {
    throw ValidationError("graph features have " + std::to_string(features->rows()) +
                          " rows for " + std::to_string(n_) + " nodes");
  }
  features_ = std::move(features);
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges,
                        std::optional<Matrix> features) {
  Graph g(n);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw ValidationError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of range for n=" + std::to_string(n));
    }
    if (i == j) throw ValidationError("self-loop at node " + std::to_string(i));
    if (!g.adj_[i * n + j]) ++g.num_edges_;
    g.adj_[i * n + j] = 1;
    g.adj_[j * n + i] = 1;
  }
  g.set_features(std::move(features));
  return g;
}

Graph Graph::from_adjacency(const Matrix& adjacency, std::optional<Matrix> features) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ValidationError("adjacency must be square");
  }
  const std::size_t n = adjacency.rows();
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("adjacency entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is not 0/1");
      }
      if (v == 1.0) {
        g.adj_[i * n + j] = g.adj_[j * n + i] = 1;
        ++g.num_edges_;
      }
    }
  }
  g.set_features(std::move(features));
  return g;
}

std::size_t Graph::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < n_; ++j) d += adj_[i * n_ + j];
  return d;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = degree(i);
  return out;
}

std::vector<std::size_t> Graph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if (adj_[i * n_ + j]) out.push_back(j);
  }
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (adj_[i * n_ + j]) out.emplace_back(i, j);
    }
  }
  return out;
}

Matrix Graph::adjacency() const {
  Matrix m(n_, n_);
  for (std::size_t k = 0; k < adj_.size(); ++k) m.data()[k] = adj_[k];
  return m;
}

bool Graph::operator==(const Graph& other) const {
  return n_ == other.n_ && adj_ == other.adj_ && features_ == other.features_;
}

ProbAdjacency::ProbAdjacency(const Matrix& probs) : probs_(probs.rows(), probs.cols()) {
  if (probs.rows() != probs.cols()) throw ValidationError("probability matrix must be square");
  const std::size_t n = probs.rows();
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double p = probs(i, j);
      if (!(p >= -kTol && p <= 1.0 + kTol)) {
        throw ValidationError("edge probability (" + std::to_string(i) + "," +
                              std::to_string(j) + ") = " + std::to_string(p) +
                              " outside [0,1]");
      }
      p = std::clamp(p, 0.0, 1.0);
      probs_(i, j) = probs_(j, i) = p;
    }
  }
}

ProbAdjacency ProbAdjacency::from_graph(const Graph& g) { return ProbAdjacency(g.adjacency()); }

Graph sample_adjacency(const ProbAdjacency& pa, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = pa.num_nodes();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(pa(i, j))) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

std::vector<double> soft_degrees(const ProbAdjacency& pa) {
  const std::size_t n = pa.num_nodes();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i] += pa(i, j);
  }
  return d;
}

Graph permute(const Graph& g, std::span<const std::size_t> perm) {
  const std::size_t n = g.num_nodes();
  if (perm.size() != n) {
    throw ValidationError("invalid permutation: length " + std::to_string(perm.size()) +
                          " for " + std::to_string(n) + " nodes");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw ValidationError("invalid permutation: not a bijection");
    seen[p] = true;
  }
  std::vector<Edge> edges;
  for (const auto& [i, j] : g.edges()) edges.emplace_back(perm[i], perm[j]);
  std::optional<Matrix> features;
  if (g.features()) {
    const Matrix& x = *g.features();
    Matrix y(x.rows(), x.cols());
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(x.row(i).begin(), x.row(i).end(), y.row(perm[i]).begin());
    }
    features = std::move(y);
  }
  return Graph::from_edges(n, edges, std::move(features));
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

Matrix PaddedBatch::padded_adjacency(std::size_t k) const {
  const Graph& g = graphs.at(k);
  Matrix m(n_max, n_max);
  for (const auto& [i, j] : g.edges()) m(i, j) = m(j, i) = 1.0;
  return m;
}

PaddedBatch pad_batch(std::vector<Graph> graphs, std::size_t n_max) {
  if (graphs.empty()) throw ValidationError("empty batch");
  PaddedBatch b;
  b.n_max = n_max;
  for (const auto& g : graphs) {
    if (n_max > 0 && g.num_nodes() > n_max) {
      throw ValidationError("graph with " + std::to_string(g.num_nodes()) +
                            " nodes exceeds n_max " + std::to_string(n_max));
    }
    b.n_max = std::max(b.n_max, g.num_nodes());
  }
  for (const auto& g : graphs) {
    std::vector<bool> mask(b.n_max, false);
    std::fill_n(mask.begin(), g.num_nodes(), true);
    b.masks.push_back(std::move(mask));
  }
  b.graphs = std::move(graphs);
  return b;
}

std::string to_json_line(const Graph& g) {
  json j;
  j["n"] = g.num_nodes();
  json edges = json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  if (g.features()) {
    const Matrix& x = *g.features();
    json rows = json::array();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      rows.push_back(std::vector<double>(x.row(i).begin(), x.row(i).end()));
    }
    j["features"] = std::move(rows);
  } else {
    j["features"] = nullptr;
  }
  return j.dump();
}

Graph graph_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
    throw ParseError("expected an object with integer field \"n\"");
  }
  const auto n_signed = j["n"].get<long long>();
  if (n_signed < 1) throw ValidationError("node count must be positive");
  const auto n = static_cast<std::size_t>(n_signed);

  std::vector<Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError("\"edges\" must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer()) {
        throw ParseError("each edge must be a pair of integers");
      }
      const auto a = e[0].get<long long>();
      const auto b = e[1].get<long long>();
      if (a < 0 || b < 0) throw ValidationError("negative edge index");
      edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    }
  }

  std::optional<Matrix> features;
  if (j.contains("features") && !j["features"].is_null()) {
    const auto& rows = j["features"];
    if (!rows.is_array()) throw ParseError("\"features\" must be an array or null");
    const std::size_t d = rows.empty() ? 0 : rows[0].size();
    Matrix x(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || rows[i].size() != d) {
        throw ParseError("feature rows must all have length " + std::to_string(d));
      }
      for (std::size_t c = 0; c < d; ++c) {
        if (!rows[i][c].is_number()) throw ParseError("feature values must be numbers");
        x(i, c) = rows[i][c].get<double>();
      }
    }
    features = std::move(x);
  }
  return Graph::from_edges(n, edges, std::move(features));
}

std::vector<Graph> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<Graph> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(graph_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_jsonl(const std::filesystem::path& path, std::span<const Graph> graphs) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& g : graphs) out << to_json_line(g) << '\n';
}

}  // namespace kgvae
