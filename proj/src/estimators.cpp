#include "gibbstv/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/log_math.hpp"
#include "gibbstv/parallel.hpp"

namespace gibbstv {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::automatic: return "auto";
    case Mode::additive: return "additive";
    case Mode::basic_relative: return "basic-relative";
    case Mode::advanced: return "advanced";
    case Mode::marginal_additive: return "marginal-additive";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::automatic, Mode::additive, Mode::basic_relative, Mode::advanced,
                 Mode::marginal_additive})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

namespace {

std::size_t ceil_count(double x) {
  if (!(x < 1.8e19)) return static_cast<std::size_t>(-1);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
}

void check_budget(std::size_t T, const EstimatorBudget& budget, const char* what) {
  if (T > budget.max_samples)
    throw GateError(std::string(what) + " needs " + std::to_string(T) +
                    " draws, above the budget limit " + std::to_string(budget.max_samples));
}

double mean_of(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

double log_count(const SpinSystem& s, double eps, const CounterConfig& cfg, Rng& rng) {
  return conditional_count(s, {}, eps, cfg, rng);
}

}  // namespace

std::size_t additive_sample_count(double eps) { return ceil_count(64.0 / (eps * eps)); }

std::size_t basic_sample_count(double K, double L, double eps, double c_T) {
  return ceil_count(c_T * 1e4 * L * L * K * K / (eps * eps));
}

std::size_t advanced_sample_count(std::size_t n, double kappa, double eps, double c_T) {
  const double nn = static_cast<double>(n);
  return ceil_count(c_T * (nn * nn * nn + nn / kappa) / (eps * eps));
}

std::size_t median_repeats(double delta) {
  if (delta >= 1.0 / 3.0) return 1;
  if (!(delta > 0.0)) throw InvalidInput("failure probability must be positive");
  auto k = static_cast<std::size_t>(std::ceil(18.0 * std::log(1.0 / delta)));
  return k % 2 ? k : k + 1;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size();
  return k % 2 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

EstimateReport additive_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget, Rng& rng) {
  require_same_pair(mu, nu);
  check_eps(eps);
  EstimateReport rep;
  rep.branch = "additive";
  rep.inner_epsilon = eps;
  if (num_vertices(mu) == 0) return rep;
  const std::size_t T = additive_sample_count(eps);
  check_budget(T, budget, "additive estimator");
  const double lzm = log_count(mu, eps / 4, budget.counter, rng);
  const double lzn = log_count(nu, eps / 4, budget.counter, rng);
  rep.counter_calls = 2;
  const Sampler sampler(mu, {}, eps / 4, budget.sampler);
  auto xs = draw_values<double>(T, rng(), budget.exec, [&](Rng& r, std::size_t) {
    const Configuration x = sampler.draw(r);
    const double a = log_weight(mu, x);
    if (a == kNegInf) return 0.0;
    const double b = log_weight(nu, x);
    if (b == kNegInf) return 1.0;
    return std::max(0.0, 1.0 - std::exp(b - a + lzm - lzn));
  });
  rep.estimate = mean_of(xs);
  rep.samples_used = T;
  return rep;
}

EstimateReport marginal_additive_tv(const SpinSystem& mu, const SpinSystem& nu,
                                    std::span<const Vertex> subset, double eps,
                                    const EstimatorBudget& budget, Rng& rng) {
  require_same_pair(mu, nu);
  check_eps(eps);
  const std::size_t n = num_vertices(mu);
  std::vector<Vertex> S(subset.begin(), subset.end());
  std::sort(S.begin(), S.end());
  if (std::adjacent_find(S.begin(), S.end()) != S.end())
    throw InvalidInput("subset lists a vertex twice");
  for (Vertex v : S)
    if (v >= n) throw InvalidInput("subset vertex " + std::to_string(v) + " out of range");
  if (S.size() > 64) throw InvalidInput("subsets above 64 vertices are not supported");
  EstimateReport rep;
  rep.branch = "marginal-additive";
  rep.inner_epsilon = eps;
  if (S.empty() || n == 0) return rep;
  const std::size_t T = additive_sample_count(eps);
  check_budget(T, budget, "marginal additive estimator");

  CounterConfig cc = budget.counter;
  cc.boost_repeats = static_cast<unsigned>(median_repeats(eps * eps / 320.0));
  const double ceps = eps / 8;
  const double lzm = log_count(mu, ceps, cc, rng);
  const double lzn = log_count(nu, ceps, cc, rng);

  const Sampler sampler(mu, {}, eps / 4, budget.sampler);
  auto keys = draw_values<std::uint64_t>(T, rng(), budget.exec, [&](Rng& r, std::size_t) {
    const Configuration x = sampler.draw(r);
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < S.size(); ++i)
      if (x[S[i]] == 1) k |= std::uint64_t{1} << i;
    return k;
  });
  // Conditional counts are needed once per distinct projected pattern.
  std::vector<std::uint64_t> uniq = keys;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const std::uint64_t count_seed = rng();
  auto ys = map_indices<double>(uniq.size(), budget.exec, [&](std::size_t i) {
    Pinning pin(n, 0);
    for (std::size_t j = 0; j < S.size(); ++j) pin[S[j]] = (uniq[i] >> j) & 1 ? 1 : -1;
    Rng r = stream_rng(count_seed, uniq[i]);
    const double cm = conditional_count(mu, pin, ceps, cc, r);
    const double cn = conditional_count(nu, pin, ceps, cc, r);
    if (cm == kNegInf) return 0.0;
    if (cn == kNegInf) return 1.0;
    return std::max(0.0, 1.0 - std::exp((cn - lzn) - (cm - lzm)));
  });
  std::vector<double> vals(T);
  for (std::size_t k = 0; k < T; ++k)
    vals[k] = ys[static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), keys[k]) - uniq.begin())];
  rep.estimate = mean_of(vals);
  rep.samples_used = T;
  rep.counter_calls = 2 + 2 * uniq.size();
  return rep;
}

double relative_threshold(ModelKind kind, double b, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n);
  if (kind == ModelKind::hardcore) return b / (2.0 * (1.0 - b) * nn);
  return 1.0 / (2.0 * (nn + 3.0 * static_cast<double>(m)));
}

MetaConditionParams meta_condition_params(const SpinSystem& mu, const SpinSystem& nu, double b) {
  MetaConditionParams p;
  const ModelKind kind = kind_of(mu);
  const std::size_t n = num_vertices(mu);
  const std::size_t m = graph_of(mu).num_edges();
  p.d_par = parameter_distance(mu, nu);
  p.theta = relative_threshold(kind, b, n, m);
  p.L = 2.0;
  if (kind == ModelKind::hardcore) {
    p.C_tv_par = b * b * b;
    p.K = 4.0 * static_cast<double>(n) / (b * p.C_tv_par);
  } else {
    p.C_tv_par = b * b / 2.0;
    p.K = 4.0 * static_cast<double>(n + m) / p.C_tv_par;
  }
  p.holds = p.d_par <= p.theta;
  if (!p.holds)
    p.reason = "parameter distance " + std::to_string(p.d_par) + " exceeds threshold " +
               std::to_string(p.theta);
  return p;
}

double w_deviation_estimate(const SpinSystem& mu, const SpinSystem& nu, double log_Z_mu,
                            double log_Z_nu, std::size_t T, const EstimatorBudget& budget,
                            Rng& rng) {
  const double delta = 1.0 / (100.0 * static_cast<double>(T));
  const Sampler sampler(mu, {}, std::min(delta, 0.5), budget.sampler);
  auto w = draw_values<double>(T, rng(), budget.exec, [&](Rng& r, std::size_t) {
    const Configuration x = sampler.draw(r);
    const double a = log_weight(mu, x);
    if (a == kNegInf) return 0.0;
    const double b = log_weight(nu, x);
    return b == kNegInf ? 0.0 : std::exp(b - a);
  });
  const double wbar = mean_of(w);
  CompensatedSum dev;
  for (double x : w) dev.add(std::abs(x - wbar));
  const double ebar = dev.value() / static_cast<double>(T);
  return std::exp(log_Z_mu - log_Z_nu) / 2.0 * ebar;
}

EstimateReport basic_relative_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                                 const MetaConditionParams& params,
                                 const EstimatorBudget& budget, Rng& rng) {
  require_same_pair(mu, nu);
  check_eps(eps);
  if (!params.holds) throw GateError("basic relative estimator: " + params.reason);
  EstimateReport rep;
  rep.branch = "basic-relative";
  rep.error_kind = ErrorKind::relative;
  rep.inner_epsilon = eps;
  rep.K = params.K;
  rep.L = params.L;
  rep.d_par = params.d_par;
  rep.theta = params.theta;
  rep.C_tv_par = params.C_tv_par;
  if (num_vertices(mu) == 0) return rep;
  const std::size_t T = basic_sample_count(params.K, params.L, eps, budget.c_T);
  check_budget(T, budget, "basic relative estimator");
  const double lzm = log_count(mu, eps / 4, budget.counter, rng);
  const double lzn = log_count(nu, eps / 4, budget.counter, rng);
  rep.counter_calls = 2;
  rep.estimate = w_deviation_estimate(mu, nu, lzm, lzn, T, budget, rng);
  rep.samples_used = T;
  return rep;
}

}  // namespace gibbstv
