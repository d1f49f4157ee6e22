#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "gibbstv/models.hpp"
#include "gibbstv/testing.hpp"

namespace gt = gibbstv::testing;

inline gibbstv::GraphPtr make_graph(std::size_t n,
                                    std::vector<std::pair<gibbstv::Vertex, gibbstv::Vertex>> e) {
  return std::make_shared<const gibbstv::Graph>(gibbstv::Graph::from_edges(n, e));
}

inline gibbstv::GraphPtr share(gibbstv::Graph g) {
  return std::make_shared<const gibbstv::Graph>(std::move(g));
}

inline gibbstv::SpinSystem hardcore(const gibbstv::GraphPtr& g, std::vector<double> lam) {
  return gibbstv::HardcoreModel(g, std::move(lam));
}

inline gibbstv::SpinSystem ising(const gibbstv::GraphPtr& g, std::vector<double> j,
                                 std::vector<gibbstv::ExtendedReal> h) {
  return gibbstv::IsingModel(g, std::move(j), std::move(h));
}

inline gibbstv::SpinSystem uniform_hardcore(const gibbstv::GraphPtr& g, double lam) {
  return hardcore(g, std::vector<double>(g->num_vertices(), lam));
}
