#include <algorithm>
#include <cmath>
#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/log_math.hpp"
#include "gibbstv/parallel.hpp"

namespace gibbstv {

double default_kappa(double eps, std::size_t n) {
  return 1e-9 * std::pow(eps, 0.25) / std::pow(static_cast<double>(n), 1.5);
}

double default_advanced_theta(double eps, std::size_t n) {
  return 1e-10 * std::pow(eps, 0.25) / std::pow(static_cast<double>(n), 2.5);
}

double eta_truncation_bound(double kappa, std::size_t t, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double td = static_cast<double>(t);
  return 1e6 * std::pow(1.0 + nn / 10.0, td + 1.0) * std::pow(kappa, td) * std::pow(nn, td + 2.0);
}

BigSmallPartition partition_big_small(const HardcoreModel& mu, const HardcoreModel& nu,
                                      double kappa) {
  BigSmallPartition p;
  p.kappa = kappa;
  p.is_big.assign(mu.num_vertices(), 0);
  for (Vertex v = 0; v < mu.num_vertices(); ++v) {
    if (std::min(mu.lambda(v), nu.lambda(v)) >= kappa) {
      p.big.push_back(v);
      p.is_big[v] = 1;
    } else {
      p.small.push_back(v);
    }
  }
  return p;
}

std::vector<std::string> AdvancedGates::failures() const {
  std::vector<std::string> f;
  if (!unique) f.emplace_back("pair is not in the uniqueness regime");
  if (!d_below_theta)
    f.emplace_back("parameter distance " + std::to_string(d_par) + " is not below theta " +
                   std::to_string(theta));
  if (!eta_ok) f.emplace_back("truncation bound eta = " + std::to_string(eta) + " exceeds eps/200");
  if (!ratio_ok) f.emplace_back("theta/kappa is not below 1/(10n)");
  if (!sum_ok) f.emplace_back("theta + kappa is not below 1/(10n)");
  return f;
}

AdvancedGates advanced_gates(const HardcoreModel& mu, const HardcoreModel& nu, double eps,
                             std::size_t t, std::optional<double> kappa_override,
                             std::optional<double> theta_override) {
  AdvancedGates g;
  const std::size_t n = mu.num_vertices();
  g.kappa = kappa_override.value_or(default_kappa(eps, n));
  g.theta = theta_override.value_or(default_advanced_theta(eps, n));
  g.eta = eta_truncation_bound(g.kappa, t, n);
  g.d_par = parameter_distance(SpinSystem(mu), SpinSystem(nu));
  g.unique = check_uniqueness(mu).has_value() && check_uniqueness(nu).has_value();
  g.d_below_theta = g.d_par < g.theta;
  g.eta_ok = g.eta <= eps / 200.0;
  const double lim = 1.0 / (10.0 * static_cast<double>(n));
  g.ratio_ok = g.theta / g.kappa < lim;
  g.sum_ok = g.theta + g.kappa < lim;
  return g;
}

namespace {

void require_big_independent(const HardcoreModel& mu, const BigSmallPartition& part,
                             std::span<const std::int8_t> x) {
  if (x.size() != mu.num_vertices()) throw InvalidInput("big-side pinning has the wrong length");
  for (Vertex v : part.big) {
    if (x[v] != 1) continue;
    for (Vertex u : mu.graph().neighbors(v))
      if (part.is_big[u] && x[u] == 1)
        throw InvalidInput("big-side pinning is not independent at " + std::to_string(v) +
                           "," + std::to_string(u));
  }
}

}  // namespace

TruncatedConditional truncated_conditional(const HardcoreModel& mu, const HardcoreModel& nu,
                                           const BigSmallPartition& part,
                                           std::span<const std::int8_t> x, std::size_t t) {
  require_big_independent(mu, part, x);
  const Graph& g = mu.graph();
  TruncatedConditional tc;
  for (Vertex v : part.small) {
    bool blocked = false;
    for (Vertex u : g.neighbors(v))
      if (part.is_big[u] && x[u] == 1) blocked = true;
    if (!blocked) tc.s_x.push_back(v);
  }
  tc.t = std::min(t, tc.s_x.size());
  const std::size_t k = tc.s_x.size();
  std::vector<double> lm(k), ln(k);
  for (std::size_t i = 0; i < k; ++i) {
    lm[i] = std::log(mu.lambda(tc.s_x[i]));
    ln[i] = std::log(nu.lambda(tc.s_x[i]));
  }
  // Ordered DFS over index-increasing independent sets of size <= t.
  std::vector<Vertex> cur;
  LogSumExp zm, zn;
  auto emit = [&](double a, double b) {
    tc.support.push_back(cur);
    tc.log_w_mu.push_back(a);
    tc.log_w_nu.push_back(b);
    zm.add(a);
    zn.add(b);
  };
  auto rec = [&](auto&& self, std::size_t start, double a, double b) -> void {
    emit(a, b);
    if (cur.size() == tc.t) return;
    for (std::size_t i = start; i < k; ++i) {
      const Vertex v = tc.s_x[i];
      bool ok = true;
      for (Vertex u : cur)
        if (g.has_edge(u, v)) ok = false;
      if (!ok) continue;
      cur.push_back(v);
      self(self, i + 1, a + lm[i], b + ln[i]);
      cur.pop_back();
    }
  };
  rec(rec, 0, 0.0, 0.0);
  tc.log_Z_mu = zm.value();
  tc.log_Z_nu = zn.value();
  return tc;
}

double log_alpha(const HardcoreModel& mu, const HardcoreModel& nu, const BigSmallPartition& part,
                 std::span<const std::int8_t> x) {
  double a = 0.0;
  for (Vertex v : part.big)
    if (x[v] == 1) a += std::log(nu.lambda(v)) - std::log(mu.lambda(v));
  return a;
}

double f_hat(const HardcoreModel& mu, const HardcoreModel& nu, const BigSmallPartition& part,
             const TruncatedConditional& tc, double R, std::span<const std::int8_t> x) {
  require_big_independent(mu, part, x);
  const double scale = std::exp(log_alpha(mu, nu, part, x)) / R;
  CompensatedSum s;
  for (std::size_t i = 0; i < tc.support.size(); ++i)
    s.add(std::abs(scale * std::exp(tc.log_w_nu[i] - tc.log_Z_mu) -
                   std::exp(tc.log_w_mu[i] - tc.log_Z_mu)));
  return 0.5 * s.value();
}

namespace {

// Big-side spins of a draw, packed into a key (bit i = big[i] occupied).
std::uint64_t big_key(const BigSmallPartition& part, const Configuration& x) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < part.big.size(); ++i)
    if (x[part.big[i]] == 1) k |= std::uint64_t{1} << i;
  return k;
}

std::vector<std::int8_t> unpack(const BigSmallPartition& part, std::size_t n, std::uint64_t k) {
  std::vector<std::int8_t> x(n, -1);
  for (std::size_t i = 0; i < part.big.size(); ++i)
    if ((k >> i) & 1) x[part.big[i]] = 1;
  return x;
}

std::vector<std::uint64_t> draw_big_keys(const HardcoreModel& mu, const BigSmallPartition& part,
                                         std::size_t T, const EstimatorBudget& budget,
                                         double delta, Rng& rng) {
  if (part.big.size() > 64) throw OracleError("more than 64 big vertices are not supported");
  const Sampler sampler(SpinSystem(mu), {}, std::min(delta, 0.5), budget.sampler);
  return draw_values<std::uint64_t>(T, rng(), budget.exec, [&](Rng& r, std::size_t) {
    return big_key(part, sampler.draw(r));
  });
}

// Averages per-key values over the draws, in draw order.
template <class Fn>
double mean_over_keys(const std::vector<std::uint64_t>& keys, Execution exec, Fn&& fn) {
  std::vector<std::uint64_t> uniq = keys;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  auto vals = map_indices<double>(uniq.size(), exec, [&](std::size_t i) { return fn(uniq[i]); });
  CompensatedSum s;
  for (auto k : keys)
    s.add(vals[static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), k) - uniq.begin())]);
  return s.value() / static_cast<double>(keys.size());
}

}  // namespace

RatioEstimate tilde_ratio_R(const HardcoreModel& mu, const HardcoreModel& nu,
                            const BigSmallPartition& part, std::size_t t, double eps,
                            const EstimatorBudget& budget, Rng& rng) {
  RatioEstimate out;
  const std::size_t n = mu.num_vertices();
  if (n == 0) return out;
  out.samples = advanced_sample_count(n, part.kappa, eps, budget.c_T);
  if (out.samples > budget.max_samples)
    throw GateError("ratio estimate needs " + std::to_string(out.samples) +
                    " draws, above the budget limit");
  const auto keys = draw_big_keys(mu, part, out.samples, budget,
                                  1.0 / (1000.0 * static_cast<double>(out.samples)), rng);
  out.R = mean_over_keys(keys, budget.exec, [&](std::uint64_t k) {
    const auto x = unpack(part, n, k);
    const auto tc = truncated_conditional(mu, nu, part, x, t);
    return std::exp(log_alpha(mu, nu, part, x) + tc.log_Z_nu - tc.log_Z_mu);
  });
  return out;
}

EstimateReport advanced_relative_tv(const SpinSystem& smu, const SpinSystem& snu, double eps,
                                    const EstimatorBudget& budget, Rng& rng) {
  require_same_pair(smu, snu);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  if (kind_of(smu) != ModelKind::hardcore)
    throw InvalidInput("the advanced estimator handles hardcore pairs only");
  const auto& mu = std::get<HardcoreModel>(smu);
  const auto& nu = std::get<HardcoreModel>(snu);
  if (!mu.is_soft() || !nu.is_soft())
    throw InvalidInput("the advanced estimator needs positive fields; preprocess first");
  EstimateReport rep;
  rep.branch = "advanced";
  rep.error_kind = ErrorKind::relative;
  rep.inner_epsilon = eps;
  const std::size_t n = mu.num_vertices();
  if (n == 0) return rep;
  const AdvancedGates gates =
      advanced_gates(mu, nu, eps, budget.t, budget.kappa_override, budget.theta_override);
  rep.d_par = gates.d_par;
  rep.theta = gates.theta;
  for (const auto& f : gates.failures()) {
    if (budget.paper_strict) throw GateError("advanced estimator: " + f);
    rep.warnings.push_back(f);
  }
  const BigSmallPartition part = partition_big_small(mu, nu, gates.kappa);
  const RatioEstimate R = tilde_ratio_R(mu, nu, part, budget.t, eps, budget, rng);
  const std::size_t T = advanced_sample_count(n, part.kappa, eps, budget.c_T);
  if (T > budget.max_samples)
    throw GateError("advanced estimator needs " + std::to_string(T) + " draws, above the budget limit");
  const auto keys = draw_big_keys(mu, part, T, budget, 1.0 / (100.0 * static_cast<double>(T)), rng);
  rep.estimate = mean_over_keys(keys, budget.exec, [&](std::uint64_t k) {
    const auto x = unpack(part, n, k);
    const auto tc = truncated_conditional(mu, nu, part, x, budget.t);
    return f_hat(mu, nu, part, tc, R.R, x);
  });
  rep.samples_used = T + R.samples;
  return rep;
}

}  // namespace gibbstv
