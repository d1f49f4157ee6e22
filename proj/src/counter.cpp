#include "gibbstv/counter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/log_math.hpp"
#include "gibbstv/regime.hpp"

namespace gibbstv {

namespace {

double mean_of(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

void require_countable(const SpinSystem& s) {
  if (const auto* is = std::get_if<IsingModel>(&s); is && !is->is_soft())
    throw InvalidInput("counting needs a soft model; preprocess or contract first");
}

}  // namespace

CountSchedule count_schedule(const SpinSystem& s, double levels_multiplier) {
  require_countable(s);
  CountSchedule out;
  const std::size_t n = num_vertices(s);
  const GraphPtr& g = graph_ptr_of(s);
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    double lmax = 0.0;
    for (double l : hc->lambda()) lmax = std::max(lmax, l);
    auto scaled = [&](double f) {
      std::vector<double> lam = hc->lambda();
      for (double& l : lam) l *= f;
      return SpinSystem(HardcoreModel(g, std::move(lam)));
    };
    out.models.push_back(scaled(0.0));
    if (lmax == 0.0) return out;
    const double s1 = std::min(1.0, 1.0 / (static_cast<double>(n) * lmax));
    out.reverse_first = true;
    if (s1 >= 1.0) {
      out.models.push_back(s);
      return out;
    }
    out.models.push_back(scaled(s1));
    const auto geo = static_cast<std::size_t>(std::max(
        1.0, std::ceil(levels_multiplier * static_cast<double>(n) * std::log1p(lmax))));
    for (std::size_t i = 1; i < geo; ++i)
      out.models.push_back(scaled(std::pow(s1, 1.0 - static_cast<double>(i) / geo)));
    out.models.push_back(s);
    return out;
  }
  const auto& is = std::get<IsingModel>(s);
  out.log_Z_base = static_cast<double>(n) * std::log(2.0);
  double amax = 0.0;
  for (double j : is.edge_couplings()) amax = std::max(amax, std::abs(j));
  for (const auto& h : is.fields()) amax = std::max(amax, std::abs(h.value()));
  auto scaled = [&](double f) {
    std::vector<double> j = is.edge_couplings();
    for (double& x : j) x *= f;
    std::vector<ExtendedReal> h;
    for (const auto& x : is.fields()) h.emplace_back(x.value() * f);
    return SpinSystem(IsingModel(g, std::move(j), std::move(h)));
  };
  out.models.push_back(scaled(0.0));
  if (amax == 0.0) return out;
  const double nm = static_cast<double>(n + is.graph().num_edges());
  const auto levels =
      static_cast<std::size_t>(std::max(1.0, std::ceil(levels_multiplier * nm * amax)));
  for (std::size_t i = 1; i < levels; ++i)
    out.models.push_back(scaled(static_cast<double>(i) / levels));
  out.models.push_back(s);
  return out;
}

std::size_t samples_per_level(std::size_t levels, double eps, const CounterConfig& cfg) {
  const double t = std::ceil(cfg.samples_per_level * static_cast<double>(levels) / (eps * eps));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

double approx_count_once(const SpinSystem& s, double eps, const CounterConfig& cfg, Rng& rng) {
  require_countable(s);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("counting accuracy must lie in (0,1)");
  const std::size_t n = num_vertices(s);
  if (n <= cfg.exact_cap) return exact_partition(s, cfg.exact_cap);
  const CountSchedule sched = count_schedule(s, cfg.levels_multiplier);
  const std::size_t levels = sched.models.size() - 1;
  if (levels == 0) return sched.log_Z_base;
  const std::size_t N = samples_per_level(levels, eps, cfg);
  const double delta = std::min(0.5, eps / (10.0 * static_cast<double>(levels)));
  const std::uint64_t base = rng();
  double log_z = sched.log_Z_base;
  for (std::size_t i = 1; i <= levels; ++i) {
    const bool reverse = sched.reverse_first && i == 1;
    const SpinSystem& from = reverse ? sched.models[1] : sched.models[i - 1];
    const SpinSystem& to = reverse ? sched.models[0] : sched.models[i];
    Sampler sampler(from, {}, delta, cfg.sampler);
    auto vals = draw_values<double>(N, derive_seed(base, i), cfg.exec, [&](Rng& r, std::size_t) {
      const Configuration x = sampler.draw(r);
      return std::exp(log_weight(to, x) - log_weight(from, x));
    });
    const double m = mean_of(vals);
    if (!(m > 0.0)) throw OracleError("annealing level " + std::to_string(i) + " saw zero weight");
    log_z += reverse ? -std::log(m) : std::log(m);
  }
  return log_z;
}

double approx_count(const SpinSystem& s, double eps, const CounterConfig& cfg, Rng& rng) {
  require_countable(s);
  if (num_vertices(s) <= cfg.exact_cap) return exact_partition(s, cfg.exact_cap);
  const unsigned k = std::max(1u, cfg.boost_repeats);
  std::vector<double> runs;
  for (unsigned r = 0; r < k; ++r) {
    Rng child(rng());
    runs.push_back(approx_count_once(s, eps, cfg, child));
  }
  std::sort(runs.begin(), runs.end());
  return k % 2 ? runs[k / 2] : 0.5 * (runs[k / 2 - 1] + runs[k / 2]);
}

double conditional_count(const SpinSystem& s, const Pinning& pin, double eps,
                         const CounterConfig& cfg, Rng& rng) {
  Contraction c = contract(s, pin);
  if (!c.feasible) return kNegInf;
  if (num_vertices(*c.reduced) == 0) return c.log_offset;
  return c.log_offset + approx_count(*c.reduced, eps, cfg, rng);
}

std::vector<double> exact_level_log_partitions(const CountSchedule& sched, std::size_t cap) {
  std::vector<double> out;
  for (const auto& m : sched.models) out.push_back(exact_partition(m, cap));
  return out;
}

namespace {

// E_{from}[w_to / w_from] by enumeration.
double exact_expectation_ratio(const SpinSystem& from, const SpinSystem& to, std::size_t cap,
                               double* second_moment = nullptr) {
  const double lz = exact_partition(from, cap);
  CompensatedSum m1, m2;
  enumerate_pair(from, to, {}, cap, [&](std::uint64_t, double a, double b) {
    if (a == kNegInf || b == kNegInf) return;
    m1.add(std::exp(b - lz));
    m2.add(std::exp(2 * b - a - lz));
  });
  if (second_moment) *second_moment = m2.value();
  return m1.value();
}

}  // namespace

std::vector<double> exact_level_ratios(const CountSchedule& sched, std::size_t cap) {
  std::vector<double> out;
  for (std::size_t i = 1; i < sched.models.size(); ++i) {
    const bool reverse = sched.reverse_first && i == 1;
    out.push_back(reverse ? exact_expectation_ratio(sched.models[1], sched.models[0], cap)
                          : exact_expectation_ratio(sched.models[i - 1], sched.models[i], cap));
  }
  return out;
}

std::vector<SpinSystem> ratio_schedule(const HardcoreModel& mu, const HardcoreModel& nu,
                                       double c_l) {
  const SpinSystem smu = mu, snu = nu;
  const double D = parameter_distance(smu, snu);
  const std::size_t n = mu.num_vertices();
  for (Vertex v = 0; v < n; ++v)
    if ((mu.lambda(v) == 0.0) != (nu.lambda(v) == 0.0))
      throw InvalidInput("zero field on one side only at vertex " + std::to_string(v) +
                         "; preprocess first");
  const auto l = static_cast<std::size_t>(
      std::max(1.0, std::ceil(c_l * (1.0 + static_cast<double>(n) * D))));
  std::vector<SpinSystem> out{smu};
  for (std::size_t i = 1; i < l; ++i) {
    std::vector<double> lam(n);
    for (Vertex v = 0; v < n; ++v)
      lam[v] = mu.lambda(v) == 0.0
                   ? 0.0
                   : mu.lambda(v) * std::pow(nu.lambda(v) / mu.lambda(v),
                                             static_cast<double>(i) / static_cast<double>(l));
    out.emplace_back(HardcoreModel(mu.graph_ptr(), std::move(lam)));
  }
  out.push_back(snu);
  return out;
}

RatioRun ratio_estimate(const SpinSystem& mu, const SpinSystem& nu, double eps,
                        const CounterConfig& cfg, Rng& rng) {
  require_same_pair(mu, nu);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("ratio accuracy must lie in (0,1)");
  RatioRun run;
  if (kind_of(mu) == ModelKind::ising) {
    const double a = approx_count(mu, eps / 3.0, cfg, rng);
    const double b = approx_count(nu, eps / 3.0, cfg, rng);
    run.estimate = std::exp(b - a);
    return run;
  }
  run.models = ratio_schedule(std::get<HardcoreModel>(mu), std::get<HardcoreModel>(nu),
                              cfg.ratio_level_multiplier);
  run.levels = run.models.size() - 1;
  const auto N = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.ratio_samples / (eps * eps))));
  run.draws = N;
  const double delta = std::min(0.5, eps / (10.0 * static_cast<double>(run.levels)));
  const std::uint64_t base = rng();
  std::vector<double> product(N, 1.0);
  for (std::size_t i = 1; i <= run.levels; ++i) {
    const SpinSystem& from = run.models[i - 1];
    const SpinSystem& to = run.models[i];
    Sampler sampler(from, {}, delta, cfg.sampler);
    auto w = draw_values<double>(N, derive_seed(base, i), cfg.exec, [&](Rng& r, std::size_t) {
      const Configuration x = sampler.draw(r);
      return std::exp(log_weight(to, x) - log_weight(from, x));
    });
    CompensatedSum s1, s2;
    for (std::size_t k = 0; k < N; ++k) {
      s1.add(w[k]);
      s2.add(w[k] * w[k]);
      product[k] *= w[k];
    }
    run.sum_w.push_back(s1.value());
    run.sum_w2.push_back(s2.value());
  }
  run.estimate = mean_of(product);
  return run;
}

SecondMomentReport empirical_second_moment(const RatioRun& run, double threshold) {
  SecondMomentReport rep;
  const double N = static_cast<double>(run.draws);
  for (std::size_t i = 0; i < run.sum_w.size(); ++i) {
    const double m1 = run.sum_w[i] / N;
    const double r = (run.sum_w2[i] / N) / (m1 * m1);
    rep.ratio.push_back(r);
    rep.flagged.push_back(r > threshold);
    rep.any_flagged = rep.any_flagged || r > threshold;
  }
  return rep;
}

std::vector<double> exact_level_second_moments(const std::vector<SpinSystem>& models,
                                               std::size_t cap) {
  std::vector<double> out;
  for (std::size_t i = 1; i < models.size(); ++i) {
    double m2 = 0.0;
    const double m1 = exact_expectation_ratio(models[i - 1], models[i], cap, &m2);
    out.push_back(m2 / (m1 * m1));
  }
  return out;
}

}  // namespace gibbstv
