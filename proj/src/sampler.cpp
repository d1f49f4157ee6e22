#include "gibbstv/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/log_math.hpp"

namespace gibbstv {

std::size_t glauber_steps(std::size_t free_vertices, double delta, double c_mix) {
  if (free_vertices == 0) return 0;
  const double f = static_cast<double>(free_vertices);
  const double s = std::ceil(c_mix * f * std::log(f / delta));
  return std::max(free_vertices, static_cast<std::size_t>(std::max(0.0, s)));
}

Sampler::Sampler(const SpinSystem& model, const Pinning& pin, double delta,
                 const SamplerConfig& cfg)
    : model_(model) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("sampler accuracy must lie in (0,1)");
  if (!(cfg.mixing_multiplier > 0.0)) throw InvalidInput("mixing multiplier must be positive");
  const std::size_t n = num_vertices(model_);
  pin_ = pin.empty() ? Pinning(n, 0) : pin;
  if (pin_.size() != n)
    throw InvalidInput("pinning length " + std::to_string(pin_.size()) +
                       " does not match model size " + std::to_string(n));
  const Pinning forced = forced_spins(model_);
  for (Vertex v = 0; v < n; ++v) {
    if (forced[v] == 0) continue;
    if (pin_[v] != 0 && pin_[v] != forced[v])
      throw InvalidInput("infeasible pinning at vertex " + std::to_string(v));
    pin_[v] = forced[v];
  }
  if (std::holds_alternative<HardcoreModel>(model_)) {
    const Graph& g = graph_of(model_);
    for (Vertex v = 0; v < n; ++v)
      if (pin_[v] == 1)
        for (Vertex u : g.neighbors(v))
          if (pin_[u] == 1) throw InvalidInput("infeasible pinning: occupied neighbours " +
                                               std::to_string(v) + "," + std::to_string(u));
  }
  for (Vertex v = 0; v < n; ++v)
    if (pin_[v] == 0) free_.push_back(v);
  if (free_.size() <= cfg.exact_fallback_cap) {
    ExactDistribution d = exact_distribution(model_, pin_, cfg.exact_fallback_cap);
    support_ = std::move(d.support);
    cdf_.reserve(support_.size());
    CompensatedSum acc;
    for (double lp : d.log_probs) {
      acc.add(std::exp(lp));
      cdf_.push_back(acc.value());
    }
  } else {
    steps_ = glauber_steps(free_.size(), delta, cfg.mixing_multiplier);
  }
}

Vertex glauber_step(const SpinSystem& s, std::span<const Vertex> free_vertices,
                    Configuration& sigma, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, free_vertices.size() - 1);
  const Vertex v = free_vertices[pick(rng)];
  const double p = logistic(log_odds_plus(s, sigma, v));
  sigma[v] = uniform01(rng) < p ? 1 : -1;
  return v;
}

void Sampler::glauber_run(Configuration& sigma, Rng& rng) const {
  for (std::size_t i = 0; i < steps_; ++i) glauber_step(model_, free_, sigma, rng);
}

Configuration Sampler::draw(Rng& rng) const {
  const std::size_t n = pin_.size();
  if (uses_exact()) {
    const double u = uniform01(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return config_from_mask(support_[static_cast<std::size_t>(it - cdf_.begin())], n);
  }
  Configuration sigma(n);
  const bool ising = std::holds_alternative<IsingModel>(model_);
  for (Vertex v = 0; v < n; ++v) {
    if (pin_[v] != 0)
      sigma[v] = pin_[v];
    else
      sigma[v] = ising && (rng() >> 63) ? 1 : -1;
  }
  glauber_run(sigma, rng);
  return sigma;
}

std::vector<std::int8_t> Sampler::draw_marginal(Rng& rng, std::span<const Vertex> subset) const {
  if (subset.empty()) return {};
  Configuration sigma = draw(rng);
  std::vector<std::int8_t> out;
  out.reserve(subset.size());
  for (Vertex v : subset) out.push_back(sigma[v]);
  return out;
}

double glauber_transition_probability(const SpinSystem& s, std::span<const Vertex> free_vertices,
                                      std::span<const std::int8_t> from,
                                      std::span<const std::int8_t> to) {
  std::vector<Vertex> diff;
  for (Vertex v = 0; v < from.size(); ++v)
    if (from[v] != to[v]) diff.push_back(v);
  if (diff.size() > 1 || free_vertices.empty()) return diff.empty() ? 1.0 : 0.0;
  const double f = static_cast<double>(free_vertices.size());
  auto p_set = [&](Vertex v, int c) {
    const double p = logistic(log_odds_plus(s, from, v));
    return c == 1 ? p : 1.0 - p;
  };
  if (diff.size() == 1) {
    const Vertex v = diff[0];
    if (std::find(free_vertices.begin(), free_vertices.end(), v) == free_vertices.end()) return 0.0;
    return p_set(v, to[v]) / f;
  }
  double stay = 0.0;
  for (Vertex v : free_vertices) stay += p_set(v, from[v]) / f;
  return stay;
}

}  // namespace gibbstv
