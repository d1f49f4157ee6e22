#include "gibbstv/graph.hpp"

#include <algorithm>
#include <string>

#include "gibbstv/errors.hpp"

namespace gibbstv {

Graph Graph::from_edges(std::size_t n,
                        std::span<const std::pair<Vertex, Vertex>> edges) {
  Graph g(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw InvalidInput("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") references a vertex outside 0.." + std::to_string(n));
    if (u == v) throw InvalidInput("self-loop at vertex " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
      throw InvalidInput("duplicate edge");
  }
  g.num_edges_ = edges.size();
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto& a = adjacency_[u];
  return std::binary_search(a.begin(), a.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(num_edges_);
  for (Vertex u = 0; u < adjacency_.size(); ++u)
    for (Vertex v : adjacency_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::size_t max_degree(const Graph& g) {
  std::size_t d = 0;
  for (Vertex v = 0; v < g.num_vertices(); ++v) d = std::max(d, g.degree(v));
  return d;
}

InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> keep) {
  InducedSubgraph out;
  out.to_new.assign(g.num_vertices(), InducedSubgraph::npos);
  std::vector<Vertex> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Vertex v : sorted) {
    out.to_new[v] = static_cast<Vertex>(out.to_old.size());
    out.to_old.push_back(v);
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u : sorted)
    for (Vertex v : g.neighbors(u))
      if (u < v && out.to_new[v] != InducedSubgraph::npos)
        edges.emplace_back(out.to_new[u], out.to_new[v]);
  out.graph = Graph::from_edges(sorted.size(), edges);
  return out;
}

bool is_independent_set(const Graph& g, std::span<const Vertex> s) {
  std::vector<char> in(g.num_vertices(), 0);
  for (Vertex v : s) in[v] = 1;
  for (Vertex u : s)
    for (Vertex v : g.neighbors(u))
      if (in[v]) return false;
  return true;
}

}  // namespace gibbstv
