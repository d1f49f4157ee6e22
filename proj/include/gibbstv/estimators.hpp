#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbstv/counter.hpp"
#include "gibbstv/models.hpp"
#include "gibbstv/regime.hpp"
#include "gibbstv/rng.hpp"
#include "gibbstv/sampler.hpp"

namespace gibbstv {

enum class Mode { automatic, additive, basic_relative, advanced, marginal_additive };

const char* to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct EstimatorBudget {
  double epsilon = 0.1;
  Mode mode = Mode::automatic;
  std::uint64_t seed = 1;
  SamplerConfig sampler;
  CounterConfig counter;
  std::size_t t = 4;
  std::optional<double> kappa_override;
  std::optional<double> theta_override;
  // Multiplier on the relative estimators' sample counts.
  double c_T = 1.0;
  // Enforce asymptotic gates instead of warning.
  bool paper_strict = false;
  // Dispatcher answers with the exact oracle.
  bool exact = false;
  std::size_t exact_cap = 20;
  // Dispatcher repeats a branch and takes the median to reach this.
  double failure_prob = 1.0 / 3.0;
  std::size_t free_degree_cap = 24;
  // Refuse to run any estimator needing more draws than this.
  std::size_t max_samples = 400000000;
  Execution exec = Execution::parallel;
};

enum class ErrorKind { additive, relative };

struct EstimateReport {
  double estimate = 0.0;
  ErrorKind error_kind = ErrorKind::additive;
  std::string branch;
  double d_par = 0.0;
  double theta = 0.0;
  double b = 0.0;
  double C_tv_par = 0.0;
  double K = 0.0;
  double L = 0.0;
  // accuracy the chosen estimator ran at
  double inner_epsilon = 0.0;
  std::size_t samples_used = 0;
  std::size_t counter_calls = 0;
  std::size_t repeats = 1;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
};

// ceil(64 / eps^2)
std::size_t additive_sample_count(double eps);
// ceil(c_T 1e4 L^2 K^2 / eps^2)
std::size_t basic_sample_count(double K, double L, double eps, double c_T);
// ceil(c_T (n^3 + n/kappa) / eps^2)
std::size_t advanced_sample_count(std::size_t n, double kappa, double eps, double c_T);
// 1 if delta >= 1/3, otherwise the odd number ceil(18 ln(1/delta)) (rounded up).
std::size_t median_repeats(double delta);

double median(std::vector<double> xs);

EstimateReport additive_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget, Rng& rng);

EstimateReport marginal_additive_tv(const SpinSystem& mu, const SpinSystem& nu,
                                    std::span<const Vertex> subset, double eps,
                                    const EstimatorBudget& budget, Rng& rng);

struct MetaConditionParams {
  double K = 0.0;
  double L = 0.0;
  bool holds = false;
  std::string reason;
  double d_par = 0.0;
  double theta = 0.0;
  double C_tv_par = 0.0;
};

// b/(2(1-b)n) for hardcore, 1/(2(n+3m)) for Ising.
double relative_threshold(ModelKind kind, double b, std::size_t n, std::size_t m);

// Hardcore: K = 4n/(b C), C = b^3. Ising: K = 4(n+m)/C, C = b^2/2. L = 2.
MetaConditionParams meta_condition_params(const SpinSystem& mu, const SpinSystem& nu,
                                          double b);

EstimateReport basic_relative_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                                 const MetaConditionParams& params,
                                 const EstimatorBudget& budget, Rng& rng);

// The W estimator of basic_relative_tv fed with given partition functions and
// T draws; returns the estimate. Used to show the small-field failure mode.
double w_deviation_estimate(const SpinSystem& mu, const SpinSystem& nu, double log_Z_mu,
                            double log_Z_nu, std::size_t T, const EstimatorBudget& budget,
                            Rng& rng);

// ---- advanced hardcore estimator ----

double default_kappa(double eps, std::size_t n);
double default_advanced_theta(double eps, std::size_t n);
// 1e6 (1 + n/10)^(t+1) kappa^t n^(t+2)
double eta_truncation_bound(double kappa, std::size_t t, std::size_t n);

struct BigSmallPartition {
  std::vector<Vertex> big;
  std::vector<Vertex> small;
  std::vector<std::uint8_t> is_big;
  double kappa = 0.0;
};

// Deterministic split by min(lambda_mu, lambda_nu) >= kappa.
BigSmallPartition partition_big_small(const HardcoreModel& mu, const HardcoreModel& nu,
                                      double kappa);

struct AdvancedGates {
  double kappa = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  double d_par = 0.0;
  bool unique = false;
  bool d_below_theta = false;
  bool eta_ok = false;
  bool ratio_ok = false;  // theta/kappa < 1/(10n)
  bool sum_ok = false;    // theta + kappa < 1/(10n)
  std::vector<std::string> failures() const;
};

AdvancedGates advanced_gates(const HardcoreModel& mu, const HardcoreModel& nu, double eps,
                             std::size_t t, std::optional<double> kappa_override,
                             std::optional<double> theta_override);

struct TruncatedConditional {
  std::size_t t = 0;
  std::vector<Vertex> s_x;  // S^x in original labels
  double log_Z_mu = 0.0;
  double log_Z_nu = 0.0;
  // independent sets of G[S^x] with size <= t, as subsets of s_x indices
  std::vector<std::vector<Vertex>> support;
  std::vector<double> log_w_mu;
  std::vector<double> log_w_nu;
};

// x: +1 set on the big side, given as a pinning of length n (only entries on
// big vertices are read; 0 counts as -1). Throws InvalidInput when the +1
// set is not independent.
TruncatedConditional truncated_conditional(const HardcoreModel& mu, const HardcoreModel& nu,
                                           const BigSmallPartition& part,
                                           std::span<const std::int8_t> x, std::size_t t);

// ln of prod over +1 big vertices of lambda_nu / lambda_mu
double log_alpha(const HardcoreModel& mu, const HardcoreModel& nu,
                 const BigSmallPartition& part, std::span<const std::int8_t> x);

// (1/(2 Zt_mu)) sum_y |alpha w_nu(y) / R - w_mu(y)|
double f_hat(const HardcoreModel& mu, const HardcoreModel& nu, const BigSmallPartition& part,
             const TruncatedConditional& tc, double R, std::span<const std::int8_t> x);

struct RatioEstimate {
  double R = 1.0;
  std::size_t samples = 0;
};

RatioEstimate tilde_ratio_R(const HardcoreModel& mu, const HardcoreModel& nu,
                            const BigSmallPartition& part, std::size_t t, double eps,
                            const EstimatorBudget& budget, Rng& rng);

EstimateReport advanced_relative_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                                    const EstimatorBudget& budget, Rng& rng);

// ---- dispatcher ----

// What dispatch_tv would run, without running it.
struct DispatchPlan {
  std::string branch;
  ErrorKind error_kind = ErrorKind::additive;
  double resolved_value = 0.0;  // preprocess-resolved / trivial branches
  double inner_epsilon = 0.0;
  double d_par = 0.0;
  double theta = 0.0;
  double b = 0.0;
  double C_tv_par = 0.0;
  double K = 0.0;
  double L = 0.0;
  std::size_t planned_samples = 0;
  std::size_t repeats = 1;
  std::vector<std::string> warnings;
  // reduced pair for the soft branches
  std::optional<SpinSystem> mu;
  std::optional<SpinSystem> nu;
};

DispatchPlan plan_dispatch(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget);

EstimateReport dispatch_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget, Rng& rng);

}  // namespace gibbstv
