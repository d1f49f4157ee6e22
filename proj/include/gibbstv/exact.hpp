#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gibbstv/models.hpp"

namespace gibbstv {

inline constexpr std::size_t kDefaultExactCap = 20;

// Configurations are bitmasks, bit v set when spin v is +1.
struct ExactDistribution {
  std::size_t n = 0;
  std::vector<std::uint64_t> support;
  std::vector<double> log_probs;
  double log_Z = 0.0;
};

using WeightVisitor = std::function<void(std::uint64_t mask, double log_w)>;
using PairVisitor =
    std::function<void(std::uint64_t mask, double log_w_mu, double log_w_nu)>;

// Depth-first walk over configurations extending pin with positive weight,
// in increasing lexicographic order of (spin 0, spin 1, ...). Throws
// OracleError when the number of free vertices exceeds cap.
void enumerate_weights(const SpinSystem& s, const Pinning& pin, std::size_t cap,
                       const WeightVisitor& visit);

// Same walk over the union of both supports.
void enumerate_pair(const SpinSystem& mu, const SpinSystem& nu, const Pinning& pin,
                    std::size_t cap, const PairVisitor& visit);

ExactDistribution exact_distribution(const SpinSystem& s, const Pinning& pin = {},
                                     std::size_t cap = kDefaultExactCap);

double exact_partition(const SpinSystem& s, std::size_t cap = kDefaultExactCap);

// -inf for infeasible pinnings.
double exact_conditional_partition(const SpinSystem& s, const Pinning& pin,
                                   std::size_t cap = kDefaultExactCap);

double exact_tv(const SpinSystem& mu, const SpinSystem& nu,
                std::size_t cap = kDefaultExactCap);

double exact_marginal_tv(const SpinSystem& mu, const SpinSystem& nu,
                         std::span<const Vertex> subset,
                         std::size_t cap = kDefaultExactCap);

// Moments of W = w_nu(X)/w_mu(X) under X ~ mu.
struct WMoments {
  double log_Z_mu = 0.0;
  double log_Z_nu = 0.0;
  double mean = 0.0;          // E[W]
  double mean_abs_dev = 0.0;  // E|E[W] - W|
  double variance = 0.0;
};

WMoments exact_w_moments(const SpinSystem& mu, const SpinSystem& nu,
                         std::size_t cap = kDefaultExactCap);

// Number of independent sets by plain enumeration.
std::uint64_t count_independent_sets(const Graph& g);

// P(v occupied) under the uniform distribution on independent sets of a
// graph with maximum degree <= 2, by a transfer matrix on v's component.
long double occupation_probability_low_degree(const Graph& g, Vertex v);

struct CountViaTvResult {
  std::uint64_t count = 0;
  // Estimated probability that vertex i is unoccupied given all j < i are.
  std::vector<long double> p_hat;
  std::size_t tv_queries = 0;
  std::size_t shortcut_vertices = 0;
};

struct CountViaTvOptions {
  std::size_t cap = kDefaultExactCap;
  // Accuracy slack of the TV oracle; the exact oracle has eps = 0.
  double epsilon = 0.0;
  bool low_degree_shortcut = true;
};

// Counts independent sets of a graph with maximum degree <= 3 using only
// single-vertex marginal TV queries. Throws InvalidInput when Delta > 3.
CountViaTvResult count_via_tv_queries(const Graph& g, const CountViaTvOptions& opt = {});

}  // namespace gibbstv
