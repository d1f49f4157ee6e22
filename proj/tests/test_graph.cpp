#include <doctest.h>

#include "gibbstv/errors.hpp"
#include "gibbstv/graph.hpp"
#include "helpers.hpp"

using namespace gibbstv;

TEST_CASE("max degree") {
  CHECK(max_degree(Graph(0)) == 0);
  CHECK(max_degree(gt::path_graph(3)) == 2);
  CHECK(max_degree(gt::cycle_graph(3)) == 2);
}

TEST_CASE("construction rejects bad edges") {
  std::vector<std::pair<Vertex, Vertex>> loop{{1, 1}}, dup{{0, 1}, {1, 0}}, out{{0, 5}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), InvalidInput);
  CHECK_THROWS_AS(Graph::from_edges(3, dup), InvalidInput);
  CHECK_THROWS_AS(Graph::from_edges(3, out), InvalidInput);
}

TEST_CASE("edges are sorted with u < v") {
  std::vector<std::pair<Vertex, Vertex>> e{{2, 1}, {0, 2}};
  const Graph g = Graph::from_edges(3, e);
  const auto es = g.edges();
  REQUIRE(es.size() == 2);
  CHECK(es[0] == std::pair<Vertex, Vertex>{0, 2});
  CHECK(es[1] == std::pair<Vertex, Vertex>{1, 2});
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 1));
}

TEST_CASE("induced subgraph examples") {
  const Graph tri = gt::cycle_graph(3);
  const Vertex all[] = {0, 1, 2}, two[] = {0, 2};
  CHECK(induced_subgraph(tri, all).graph.num_edges() == 3);
  CHECK(induced_subgraph(tri, two).graph.num_edges() == 1);
  const auto p = induced_subgraph(gt::path_graph(3), two);
  CHECK(p.graph.num_vertices() == 2);
  CHECK(p.graph.num_edges() == 0);
  CHECK(p.to_new[1] == InducedSubgraph::npos);
  CHECK(p.to_old[1] == 2);
}

TEST_CASE("induced subgraph relabels back to the restricted adjacency") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Graph g = gt::random_graph(9, 0.4, 9, rng);
    std::vector<Vertex> keep;
    for (Vertex v = 0; v < 9; ++v)
      if (rng() % 2) keep.push_back(v);
    const auto sub = induced_subgraph(g, keep);
    for (Vertex a = 0; a < keep.size(); ++a)
      for (Vertex b = 0; b < keep.size(); ++b)
        if (a != b)
          CHECK(sub.graph.has_edge(a, b) == g.has_edge(sub.to_old[a], sub.to_old[b]));
  }
}

TEST_CASE("independent sets") {
  const Graph e = gt::path_graph(2), p = gt::path_graph(3);
  const Vertex both[] = {0, 1}, ends[] = {0, 2};
  CHECK(is_independent_set(e, std::span<const Vertex>{}));
  CHECK_FALSE(is_independent_set(e, both));
  CHECK(is_independent_set(p, ends));

  Rng rng(3);
  const Graph g = gt::random_graph(8, 0.4, 8, rng);
  for (std::uint32_t m = 0; m < 256; ++m) {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < 8; ++v)
      if ((m >> v) & 1) s.push_back(v);
    bool scan = true;
    for (auto [u, v] : g.edges())
      if (((m >> u) & 1) && ((m >> v) & 1)) scan = false;
    CHECK(is_independent_set(g, s) == scan);
  }
}
