#pragma once

// Random instance generators and brute-force reference oracles. The oracles
// evaluate weights as plain products over all 2^n configurations and share
// no code with the enumeration in exact.hpp.

#include <cstdint>
#include <vector>

#include "gibbstv/models.hpp"
#include "gibbstv/rng.hpp"

namespace gibbstv::testing {

Graph random_graph(std::size_t n, double p, std::size_t max_deg, Rng& rng);
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);

double uniform(Rng& rng, double lo, double hi);

HardcoreModel random_hardcore(const GraphPtr& g, double lo, double hi, Rng& rng);
IsingModel random_ising(const GraphPtr& g, double j_scale, double h_scale, Rng& rng);

// Moves every parameter by at most `by` (keeps hardcore fields >= floor).
HardcoreModel perturb(const HardcoreModel& m, double by, Rng& rng, double floor = 1e-12);
IsingModel perturb(const IsingModel& m, double by_j, double by_h, Rng& rng);

// Plain weight of configuration mask (bit v = +1).
double bf_weight(const SpinSystem& s, std::uint64_t mask);
// Probabilities indexed by mask, all 2^n entries.
std::vector<double> bf_distribution(const SpinSystem& s);
double bf_partition(const SpinSystem& s);
// pin: 0 free, +-1 fixed.
double bf_conditional_partition(const SpinSystem& s, const Pinning& pin);
double bf_tv(const SpinSystem& mu, const SpinSystem& nu);
double bf_marginal_tv(const SpinSystem& mu, const SpinSystem& nu,
                      const std::vector<Vertex>& subset);
// min over v, c and all pinnings of V \ {v} of mu_v^sigma(c), over positive values.
double bf_marginal_bound(const SpinSystem& s);
std::uint64_t bf_independent_sets(const Graph& g);

}  // namespace gibbstv::testing
