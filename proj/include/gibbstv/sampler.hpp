#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbstv/exact.hpp"
#include "gibbstv/models.hpp"
#include "gibbstv/rng.hpp"

namespace gibbstv {

struct SamplerConfig {
  double mixing_multiplier = 20.0;
  // Perfect sampling by enumeration when at most this many vertices are free.
  std::size_t exact_fallback_cap = 20;
};

// Number of heat-bath updates for f free vertices at accuracy delta.
std::size_t glauber_steps(std::size_t free_vertices, double delta, double c_mix);

// Draws from mu conditioned on a pinning. Construction does the expensive
// setup (feasibility check, enumeration table); draw() is const and can be
// called concurrently with distinct generators.
class Sampler {
 public:
  Sampler(const SpinSystem& model, const Pinning& pin, double delta,
          const SamplerConfig& cfg);

  Configuration draw(Rng& rng) const;
  // Projection of draw() onto subset, in subset order.
  std::vector<std::int8_t> draw_marginal(Rng& rng, std::span<const Vertex> subset) const;

  bool uses_exact() const { return !cdf_.empty(); }
  std::size_t steps() const { return steps_; }
  const Pinning& effective_pin() const { return pin_; }

 private:
  void glauber_run(Configuration& sigma, Rng& rng) const;

  SpinSystem model_;
  Pinning pin_;
  std::vector<Vertex> free_;
  std::size_t steps_ = 0;
  std::vector<std::uint64_t> support_;
  std::vector<double> cdf_;
};

// One random-scan heat-bath update in place; returns the vertex chosen.
Vertex glauber_step(const SpinSystem& s, std::span<const Vertex> free_vertices,
                    Configuration& sigma, Rng& rng);

// Exact one-step transition probability of the random-scan heat-bath chain
// over free_vertices.
double glauber_transition_probability(const SpinSystem& s,
                                      std::span<const Vertex> free_vertices,
                                      std::span<const std::int8_t> from,
                                      std::span<const std::int8_t> to);

}  // namespace gibbstv
