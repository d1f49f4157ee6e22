#pragma once

#include <cstddef>
#include <vector>

#include "gibbstv/models.hpp"
#include "gibbstv/parallel.hpp"
#include "gibbstv/rng.hpp"
#include "gibbstv/sampler.hpp"

namespace gibbstv {

struct CounterConfig {
  // Scales the number of annealing levels.
  double levels_multiplier = 1.0;
  // Samples per level are ceil(samples_per_level * levels / eps^2).
  double samples_per_level = 1.0;
  unsigned boost_repeats = 9;
  // Exact enumeration instead of annealing when at most this many vertices
  // are free. 0 disables the shortcut.
  std::size_t exact_cap = 20;
  // c_l in l = ceil(c_l (1 + n D)) for the ratio estimator.
  double ratio_level_multiplier = 4.0;
  // Ratio estimator draws ceil(ratio_samples / eps^2) products.
  double ratio_samples = 4.0;
  // empirical_second_moment flags levels above this value.
  double second_moment_threshold = 2.0;
  SamplerConfig sampler;
  Execution exec = Execution::parallel;
};

// One interpolation level: model index i is estimated from samples of
// model `from`, averaging w_to / w_from.
struct CountSchedule {
  std::vector<SpinSystem> models;  // models[0] is the base
  double log_Z_base = 0.0;
  // true: level 1 estimated in reverse as Z_0/Z_1 = E_1[w_0/w_1]
  bool reverse_first = false;
};

// Requires a soft model.
CountSchedule count_schedule(const SpinSystem& s, double levels_multiplier);

// Sample count used per level at accuracy eps.
std::size_t samples_per_level(std::size_t levels, double eps, const CounterConfig& cfg);

// ln Z estimate with relative error eps on Z; median of boost_repeats runs.
// Throws InvalidInput for non-soft models.
double approx_count(const SpinSystem& s, double eps, const CounterConfig& cfg, Rng& rng);

// Single unboosted run.
double approx_count_once(const SpinSystem& s, double eps, const CounterConfig& cfg,
                         Rng& rng);

// ln Z^pin; contracts the pinning (and forced spins) then counts the rest.
// Infeasible pinnings give -inf.
double conditional_count(const SpinSystem& s, const Pinning& pin, double eps,
                         const CounterConfig& cfg, Rng& rng);

// Exact log partition of every level; for the telescoping identity test.
std::vector<double> exact_level_log_partitions(const CountSchedule& sched,
                                               std::size_t cap = 20);

// Exact per-level expectations E_{from}[w_to / w_from].
std::vector<double> exact_level_ratios(const CountSchedule& sched, std::size_t cap = 20);

struct RatioRun {
  double estimate = 1.0;  // of Z_nu / Z_mu
  std::size_t levels = 0;
  std::size_t draws = 0;
  std::vector<double> sum_w;   // per level, over draws
  std::vector<double> sum_w2;
  std::vector<SpinSystem> models;
};

// Interpolation lambda^(i) = lambda_mu * delta^(i/l), l = ceil(c_l (1 + n D)).
std::vector<SpinSystem> ratio_schedule(const HardcoreModel& mu, const HardcoreModel& nu,
                                       double c_l);

// Estimate of Z_nu / Z_mu. Ising pairs fall back to two approx_count calls
// (the run then carries no per-level data).
RatioRun ratio_estimate(const SpinSystem& mu, const SpinSystem& nu, double eps,
                        const CounterConfig& cfg, Rng& rng);

struct SecondMomentReport {
  std::vector<double> ratio;  // E[W_i^2] / E[W_i]^2
  std::vector<bool> flagged;
  bool any_flagged = false;
};

SecondMomentReport empirical_second_moment(const RatioRun& run, double threshold);

// Exact per-level E[W_i^2]/E[W_i]^2 for a schedule.
std::vector<double> exact_level_second_moments(const std::vector<SpinSystem>& models,
                                               std::size_t cap = 20);

}  // namespace gibbstv
