#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gibbstv {

using Vertex = std::uint32_t;

// Undirected simple graph on vertices 0..n-1 with sorted adjacency lists.
// Immutable after construction.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adjacency_(n) {}

  // Throws InvalidInput on self-loops, duplicate edges or out-of-range ends.
  static Graph from_edges(std::size_t n,
                          std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t num_vertices() const noexcept { return adjacency_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  // Edges as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t num_edges_ = 0;
};

std::size_t max_degree(const Graph& g);

struct InducedSubgraph {
  Graph graph;
  // old label -> new label, or npos when dropped
  std::vector<Vertex> to_new;
  // new label -> old label
  std::vector<Vertex> to_old;
  static constexpr Vertex npos = static_cast<Vertex>(-1);
};

// Kept vertices are relabelled in increasing order of their old labels.
InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> keep);

bool is_independent_set(const Graph& g, std::span<const Vertex> s);

}  // namespace gibbstv
