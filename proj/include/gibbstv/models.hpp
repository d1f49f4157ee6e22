#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gibbstv/extended_real.hpp"
#include "gibbstv/graph.hpp"

namespace gibbstv {

// +1 / -1 per vertex.
using Configuration = std::vector<std::int8_t>;
// +1 / -1 on pinned vertices, 0 on free ones.
using Pinning = std::vector<std::int8_t>;

using GraphPtr = std::shared_ptr<const Graph>;

class HardcoreModel {
 public:
  // Throws InvalidInput on negative / non-finite fields or size mismatch.
  HardcoreModel(GraphPtr graph, std::vector<double> lambda);

  const Graph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  std::size_t num_vertices() const { return lambda_.size(); }
  const std::vector<double>& lambda() const { return lambda_; }
  double lambda(Vertex v) const { return lambda_[v]; }
  // All fields strictly positive.
  bool is_soft() const;

 private:
  GraphPtr graph_;
  std::vector<double> lambda_;
};

class IsingModel {
 public:
  // edge_couplings is aligned with graph->edges().
  IsingModel(GraphPtr graph, std::vector<double> edge_couplings,
             std::vector<ExtendedReal> fields);

  const Graph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  std::size_t num_vertices() const { return fields_.size(); }
  const std::vector<double>& edge_couplings() const { return edge_j_; }
  const std::vector<ExtendedReal>& fields() const { return fields_; }
  const ExtendedReal& field(Vertex v) const { return fields_[v]; }
  // Coupling to the k-th entry of graph().neighbors(v).
  double coupling_at(Vertex v, std::size_t k) const { return adj_j_[v][k]; }
  double coupling(Vertex u, Vertex v) const;
  bool is_soft() const;

 private:
  GraphPtr graph_;
  std::vector<double> edge_j_;
  std::vector<std::vector<double>> adj_j_;
  std::vector<ExtendedReal> fields_;
};

using SpinSystem = std::variant<HardcoreModel, IsingModel>;

enum class ModelKind { hardcore, ising };

ModelKind kind_of(const SpinSystem& s);
const Graph& graph_of(const SpinSystem& s);
const GraphPtr& graph_ptr_of(const SpinSystem& s);
std::size_t num_vertices(const SpinSystem& s);
bool is_soft(const SpinSystem& s);

// ln w(sigma); -inf encodes weight zero. Infinite Ising fields only forbid
// the opposing spin and contribute no factor.
double log_weight(const SpinSystem& s, std::span<const std::int8_t> sigma);

// ln w(sigma with v=+1) - ln w(sigma with v=-1) given the other spins. May be
// +-inf. Neighbours with spin 0 (unassigned) are ignored.
double log_odds_plus(const SpinSystem& s, std::span<const std::int8_t> sigma,
                     Vertex v);

// Spins forced by the model alone: hardcore lambda=0 -> -1, Ising +-inf -> sign.
Pinning forced_spins(const SpinSystem& s);

// Throws InvalidInput if the two models live on different graphs or kinds.
void require_same_pair(const SpinSystem& mu, const SpinSystem& nu);

// Result of conditioning on a pinning and deleting the pinned vertices.
struct Contraction {
  bool feasible = true;
  std::optional<SpinSystem> reduced;
  // ln of the weight factor contributed by the pinned part, so that
  // ln Z^pin = offset + ln Z(reduced).
  double log_offset = 0.0;
  // reduced label -> original label
  std::vector<Vertex> to_old;
  // Full pinning actually applied (input pin plus spins it forces).
  Pinning applied;
};

// Conditions on pin together with the model's own forced spins. Hardcore
// neighbours of occupied vertices are forced to -1 and removed too.
Contraction contract(const SpinSystem& s, const Pinning& pin);

// Convert a bitmask (bit v = spin +1) to a configuration.
Configuration config_from_mask(std::uint64_t mask, std::size_t n);
std::uint64_t mask_from_config(std::span<const std::int8_t> sigma);

}  // namespace gibbstv
