#include "gibbstv/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "gibbstv/counter.hpp"
#include "gibbstv/errors.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/regime.hpp"
#include "gibbstv/testing.hpp"

namespace gibbstv {

namespace t = testing;

namespace {

using Clock = std::chrono::steady_clock;

// Stream tags keep the criteria's random instances independent of each other.
enum Tag : std::uint64_t {
  kTagIdentity = 1,
  kTagLowerBound,
  kTagSmallField,
  kTagTruncation,
  kTagAdditive,
  kTagMarginal,
  kTagBasic,
  kTagAdvanced,
  kTagCounter,
  kTagMarginalBound,
  kTagVarianceGate,
  kTagFVariance,
};

std::uint64_t case_seed(const SuiteOptions& opt, Tag tag, std::uint64_t k) {
  return derive_seed(derive_seed(opt.seed, tag), k);
}

GraphPtr share(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

// Runs body and fills in timing and the runtime part of the verdict.
CriterionResult timed(std::string id, std::string name, double limit,
                      const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.limit_seconds = limit;
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.seconds > limit) {
    r.passed = false;
    r.detail += " [runtime " + fmt(r.seconds, 3) + "s over limit " + fmt(limit, 3) + "s]";
  }
  return r;
}

CsvRow row(const std::string& suite, std::string id, std::uint64_t seed, double budget,
           double est, double truth, bool pass) {
  CsvRow c;
  c.suite = suite;
  c.case_id = std::move(id);
  c.seed = seed;
  c.budget = budget;
  c.estimate = est;
  c.truth = truth;
  c.abs_err = std::abs(est - truth);
  c.rel_err = truth != 0.0 ? c.abs_err / std::abs(truth) : c.abs_err;
  c.pass = pass;
  return c;
}

// A soft pair whose parameters differ by roughly `scale`.
std::pair<SpinSystem, SpinSystem> random_soft_pair(Rng& rng, ModelKind kind, std::size_t n,
                                                   double scale) {
  const GraphPtr g = share(t::random_graph(n, 0.5, 4, rng));
  if (kind == ModelKind::hardcore) {
    auto mu = t::random_hardcore(g, 0.05, 2.5, rng);
    auto nu = t::perturb(mu, scale, rng, 1e-3);
    return {SpinSystem(mu), SpinSystem(nu)};
  }
  auto mu = t::random_ising(g, 0.8, 0.8, rng);
  auto nu = t::perturb(mu, scale, scale, rng);
  return {SpinSystem(mu), SpinSystem(nu)};
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(t::uniform(rng, std::log(lo), std::log(hi)));
}

double lower_bound_b(const SpinSystem& mu, const SpinSystem& nu) {
  return std::min(marginal_lower_bound(mu).b, marginal_lower_bound(nu).b);
}

// ---- small-field hardcore pairs ----

struct SmallFieldCase {
  HardcoreModel mu;
  HardcoreModel nu;
  double kappa;
  double theta;
  double D;
};

// Big vertices get fields well above kappa, small ones below; nu moves each
// field by at most 0.95 theta, one vertex by exactly that.
SmallFieldCase small_field_case(Rng& rng, std::size_t n, double kappa, double theta,
                                double big_prob, double max_deg = 4) {
  const GraphPtr g = share(t::random_graph(n, 0.5, static_cast<std::size_t>(max_deg), rng));
  const double lc = lambda_critical(std::max<std::size_t>(3, max_degree(*g)));
  const double cap = std::min(1.5, 0.8 * lc);
  std::vector<double> lm(n), ln(n);
  const double D = 0.95 * theta;
  const auto hit = static_cast<Vertex>(rng() % n);
  for (Vertex v = 0; v < n; ++v) {
    const bool big = t::uniform(rng, 0, 1) < big_prob;
    lm[v] = big ? t::uniform(rng, std::max(2 * kappa, 0.05), cap)
                : t::uniform(rng, 0.05 * kappa, 0.9 * kappa);
    const double shift = v == hit ? (rng() % 2 ? D : -D) : t::uniform(rng, -D, D);
    ln[v] = lm[v] + shift;
  }
  HardcoreModel mu(g, lm), nu(g, ln);
  const double d = parameter_distance(mu, nu);
  return {std::move(mu), std::move(nu), kappa, theta, d};
}

// Per big-side pattern x (indexed by the full mask of its occupied big
// vertices): sums of weights over completions and the conditional TV on S.
struct PatternTable {
  std::vector<double> sum_mu, sum_nu, wb_mu, wb_nu, cond_tv, f;
  std::vector<std::uint64_t> patterns;  // x with mu_B(x) > 0
  double Z_mu = 0.0, Z_nu = 0.0, tv = 0.0;
};

PatternTable pattern_table(const HardcoreModel& mu, const HardcoreModel& nu,
                           const BigSmallPartition& part) {
  const std::size_t n = mu.num_vertices();
  const std::uint64_t N = std::uint64_t{1} << n;
  std::uint64_t bmask = 0;
  for (Vertex v : part.big) bmask |= std::uint64_t{1} << v;
  PatternTable pt;
  std::vector<double> wm(N), wn(N);
  pt.sum_mu.assign(N, 0.0);
  pt.sum_nu.assign(N, 0.0);
  for (std::uint64_t m = 0; m < N; ++m) {
    wm[m] = t::bf_weight(SpinSystem(mu), m);
    wn[m] = t::bf_weight(SpinSystem(nu), m);
    pt.sum_mu[m & bmask] += wm[m];
    pt.sum_nu[m & bmask] += wn[m];
    pt.Z_mu += wm[m];
    pt.Z_nu += wn[m];
  }
  pt.wb_mu.assign(N, 1.0);
  pt.wb_nu.assign(N, 1.0);
  pt.cond_tv.assign(N, 0.0);
  pt.f.assign(N, 0.0);
  for (std::uint64_t x = 0; x < N; ++x) {
    if ((x & ~bmask) != 0 || pt.sum_mu[x] == 0.0) continue;
    pt.patterns.push_back(x);
    for (Vertex v : part.big)
      if ((x >> v) & 1) {
        pt.wb_mu[x] *= mu.lambda(v);
        pt.wb_nu[x] *= nu.lambda(v);
      }
  }
  for (std::uint64_t m = 0; m < N; ++m) {
    const std::uint64_t x = m & bmask;
    if (pt.sum_mu[x] == 0.0) continue;
    pt.cond_tv[x] += 0.5 * std::abs(wn[m] / pt.sum_nu[x] - wm[m] / pt.sum_mu[x]);
    const double mu_b = pt.sum_mu[x] / pt.Z_mu;
    pt.f[x] += 0.5 * std::abs(wn[m] / pt.Z_nu - wm[m] / pt.Z_mu) / mu_b;
    pt.tv += 0.5 * std::abs(wn[m] / pt.Z_nu - wm[m] / pt.Z_mu);
  }
  return pt;
}

Pinning pattern_pin(std::uint64_t x, std::size_t n) {
  Pinning p(n, -1);
  for (Vertex v = 0; v < n; ++v)
    if ((x >> v) & 1) p[v] = 1;
  return p;
}

// Relative slack for bounds checked in floating point.
constexpr double kRound = 1e-12;

// Advanced-estimator kappa meeting eta <= eps/200 with a margin.
double desk_kappa(double eps, std::size_t n, std::size_t tt) {
  const double nn = static_cast<double>(n);
  const double denom = 1e6 * std::pow(1.0 + nn / 10.0, tt + 1.0) * std::pow(nn, tt + 2.0);
  return 0.9 * std::pow(eps / 200.0 / denom, 1.0 / static_cast<double>(tt));
}

}  // namespace

// ---- 1 ----

CriterionResult check_w_identity(const SuiteOptions& opt) {
  return timed("C1", "exact W identity", 60, [&](CriterionResult& r) {
    const std::size_t cases = 200;
    std::size_t bad = 0;
    double worst_tv = 0.0, worst_mean = 0.0;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagIdentity, k);
      Rng rng(seed);
      const auto kind = k % 2 ? ModelKind::ising : ModelKind::hardcore;
      const std::size_t n = 1 + rng() % 8;
      const auto [mu, nu] = random_soft_pair(rng, kind, n, log_uniform(rng, 1e-4, 1.0));
      const WMoments w = exact_w_moments(mu, nu);
      const double tv_id = std::exp(w.log_Z_mu - w.log_Z_nu) / 2.0 * w.mean_abs_dev;
      const double tv = t::bf_tv(mu, nu);
      const double ratio = t::bf_partition(nu) / t::bf_partition(mu);
      const double e1 = std::abs(tv_id - tv);
      const double e2 = std::abs(w.mean - ratio) / ratio;
      worst_tv = std::max(worst_tv, e1);
      worst_mean = std::max(worst_mean, e2);
      const bool ok = e1 <= 1e-10 && e2 <= 1e-10;
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("oracle-equivalence", "C1-" + std::to_string(k), seed, 0, tv_id, tv, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " pairs, " + std::to_string(bad) +
               " violations; max |TV identity - TV| " + fmt(worst_tv, 3) +
               ", max rel err of E[W] " + fmt(worst_mean, 3);
  });
}

// ---- 2 ----

CriterionResult check_lower_bound(const SuiteOptions& opt) {
  return timed("C2", "TV lower bound from parameter distance", 120, [&](CriterionResult& r) {
    const std::size_t cases = 500;
    std::size_t bad = 0, unique_cases = 0;
    double min_slack = 1e300;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagLowerBound, k);
      Rng rng(seed);
      const auto kind = k % 2 ? ModelKind::ising : ModelKind::hardcore;
      const std::size_t n = 1 + rng() % 8;
      std::pair<SpinSystem, SpinSystem> pr = random_soft_pair(rng, kind, n, log_uniform(rng, 1e-5, 2.0));
      if (kind == ModelKind::hardcore && k % 4 == 0) {
        // fields inside the uniqueness window to exercise the 1/5000 case
        const GraphPtr g = graph_ptr_of(pr.first);
        const double lc = lambda_critical(std::max<std::size_t>(3, max_degree(*g)));
        auto mu = t::random_hardcore(g, 0.01, 0.95 * lc, rng);
        auto nu = t::perturb(mu, log_uniform(rng, 1e-5, 0.05 * lc), rng, 1e-3);
        std::vector<double> lam = nu.lambda();
        for (double& l : lam) l = std::min(l, 0.99 * lc);
        pr = {SpinSystem(mu), SpinSystem(HardcoreModel(g, lam))};
      }
      const auto& [mu, nu] = pr;
      LowerBoundCase lb;
      if (kind == ModelKind::hardcore)
        lb.hardcore_uniqueness = uniqueness_for_lower_bound(std::get<HardcoreModel>(mu)) &&
                                 uniqueness_for_lower_bound(std::get<HardcoreModel>(nu));
      unique_cases += lb.hardcore_uniqueness;
      lb.marginal_bound = lower_bound_b(mu, nu);
      const double C = tv_lower_bound_constant(kind, lb);
      const double d = parameter_distance(mu, nu);
      const double tv = t::bf_tv(mu, nu);
      const double bound = C * d;
      const bool ok = tv >= bound * (1 - kRound);
      if (bound > 0) min_slack = std::min(min_slack, tv / bound);
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("lemma-bounds", "C2-" + std::to_string(k), seed, C, bound, tv, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " pairs (" + std::to_string(unique_cases) +
               " in hardcore uniqueness), " + std::to_string(bad) +
               " violations; min TV/(C d_par) " + fmt(min_slack, 4);
  });
}

// ---- 3 ----

CriterionResult check_small_field_lemmas(const SuiteOptions& opt) {
  return timed("C3", "small-field conditional bounds", 300, [&](CriterionResult& r) {
    const std::size_t cases = 120;
    std::size_t bad = 0, patterns = 0;
    double worst[4] = {0, 0, 0, 0};  // observed / bound
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagSmallField, k);
      Rng rng(seed);
      const std::size_t n = 2 + rng() % 9;
      const double nn = static_cast<double>(n);
      const double kappa = 1.0 / (20.0 * nn);
      const double theta = kappa / (20.0 * nn);
      const auto c = small_field_case(rng, n, kappa, theta, 0.5);
      const auto part = partition_big_small(c.mu, c.nu, kappa);
      const auto pt = pattern_table(c.mu, c.nu, part);
      const double D = c.D;
      bool ok = true;
      for (auto x : pt.patterns) {
        ++patterns;
        const double zm = pt.sum_mu[x] / pt.wb_mu[x];
        const double zn = pt.sum_nu[x] / pt.wb_nu[x];
        const double g = (pt.sum_nu[x] / pt.Z_nu) / (pt.sum_mu[x] / pt.Z_mu);
        const double b1 = 2 * nn * D, b2 = 10 * nn * D / kappa, b3 = 4 * nn * D;
        const bool range = zm >= 1 - kRound && zn >= 1 - kRound && zm < 2 && zn < 2;
        const bool l1 = std::abs(zm - zn) <= b1 * (1 + kRound);
        const bool l2 = std::abs(g - 1) <= b2 * (1 + kRound);
        const bool l3 = pt.cond_tv[x] <= b3 * (1 + kRound);
        worst[0] = std::max({worst[0], zm, zn});
        worst[1] = std::max(worst[1], std::abs(zm - zn) / b1);
        worst[2] = std::max(worst[2], std::abs(g - 1) / b2);
        worst[3] = std::max(worst[3], pt.cond_tv[x] / b3);
        ok = ok && range && l1 && l2 && l3;
      }
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("lemma-bounds", "C3-" + std::to_string(k), seed, kappa, worst[2], 1.0, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " pairs, " + std::to_string(patterns) + " patterns x, " +
               std::to_string(bad) + " violating pairs; max Z^x " + fmt(worst[0]) +
               ", max |dZ|/(2nD) " + fmt(worst[1]) + ", max |g-1|/(10nD/kappa) " +
               fmt(worst[2]) + ", max TV_S/(4nD) " + fmt(worst[3]);
  });
}

// ---- 4 ----

CriterionResult check_truncation(const SuiteOptions& opt) {
  return timed("C4", "truncation exactness at t = |S|", 120, [&](CriterionResult& r) {
    const std::size_t cases = 120;
    std::size_t bad = 0, patterns = 0;
    double worst_z = 0.0, worst_f = 0.0;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagTruncation, k);
      Rng rng(seed);
      const std::size_t n = 1 + rng() % 10;
      const double nn = static_cast<double>(n);
      // any kappa works here; the identities hold without the lemma preconditions
      const double kappa = log_uniform(rng, 1e-3, 0.5);
      const double theta = log_uniform(rng, 1e-4, 0.1) * kappa / nn;
      const auto c = small_field_case(rng, n, kappa, theta, 0.5);
      const auto part = partition_big_small(c.mu, c.nu, kappa);
      const auto pt = pattern_table(c.mu, c.nu, part);
      const double R = pt.Z_nu / pt.Z_mu;
      bool ok = true;
      for (auto x : pt.patterns) {
        ++patterns;
        const Pinning xp = pattern_pin(x, n);
        const auto tc = truncated_conditional(c.mu, c.nu, part, xp, part.small.size());
        const double zm = pt.sum_mu[x] / pt.wb_mu[x];
        const double zn = pt.sum_nu[x] / pt.wb_nu[x];
        const double ez = std::max(std::abs(std::exp(tc.log_Z_mu) - zm) / zm,
                                   std::abs(std::exp(tc.log_Z_nu) - zn) / zn);
        const double fh = f_hat(c.mu, c.nu, part, tc, R, xp);
        const double ef = std::abs(fh - pt.f[x]);
        worst_z = std::max(worst_z, ez);
        worst_f = std::max(worst_f, ef);
        ok = ok && ez <= 1e-10 && ef <= 1e-10;
      }
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("oracle-equivalence", "C4-" + std::to_string(k), seed,
                           static_cast<double>(part.small.size()), worst_f, 0.0, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " instances, " + std::to_string(patterns) +
               " patterns, " + std::to_string(bad) + " failing; max rel err Z " +
               fmt(worst_z, 3) + ", max |f_hat - f| " + fmt(worst_f, 3);
  });
}

// ---- 5 ----

namespace {

std::pair<SpinSystem, SpinSystem> coverage_pair(Rng& rng, std::size_t k) {
  const auto kind = k % 2 ? ModelKind::ising : ModelKind::hardcore;
  const std::size_t n = 3 + k % 8;
  return random_soft_pair(rng, kind, n, log_uniform(rng, 0.01, 1.0));
}

}  // namespace

CriterionResult check_additive_coverage(const SuiteOptions& opt) {
  return timed("C5", "additive estimator coverage", 600, [&](CriterionResult& r) {
    const double eps = 0.05;
    const std::size_t pairs = 20, runs = 100, need = 85;
    EstimatorBudget budget;
    budget.exec = opt.exec;
    std::size_t worst_full = runs, worst_marg = runs, bad = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto seed = case_seed(opt, kTagAdditive, k);
      Rng rng(seed);
      const auto [mu, nu] = coverage_pair(rng, k);
      const std::size_t n = num_vertices(mu);
      std::vector<Vertex> subset;
      for (Vertex v = 0; v < n; ++v)
        if (rng() % 2) subset.push_back(v);
      if (subset.empty()) subset.push_back(static_cast<Vertex>(rng() % n));
      const double tv = exact_tv(mu, nu);
      const double mtv = exact_marginal_tv(mu, nu, subset);
      std::size_t hit_full = 0, hit_marg = 0;
      for (std::size_t run = 0; run < runs; ++run) {
        const auto rs = case_seed(opt, kTagMarginal, k * runs + run);
        Rng a(rs), b(rs + 1);
        const auto e1 = additive_tv(mu, nu, eps, budget, a);
        const auto e2 = marginal_additive_tv(mu, nu, subset, eps, budget, b);
        const bool ok1 = std::abs(e1.estimate - tv) <= eps;
        const bool ok2 = std::abs(e2.estimate - mtv) <= eps;
        hit_full += ok1;
        hit_marg += ok2;
        const std::string id = "C5-" + std::to_string(k) + "-" + std::to_string(run);
        r.rows.push_back(row("estimator-accuracy", id + "-full", rs,
                             static_cast<double>(e1.samples_used), e1.estimate, tv, ok1));
        r.rows.push_back(row("estimator-accuracy", id + "-marginal", rs,
                             static_cast<double>(e2.samples_used), e2.estimate, mtv, ok2));
      }
      worst_full = std::min(worst_full, hit_full);
      worst_marg = std::min(worst_marg, hit_marg);
      if (hit_full < need || hit_marg < need) {
        ++bad;
        r.failures.push_back("pair " + std::to_string(k) + " seed " + std::to_string(seed));
      }
    }
    r.passed = bad == 0;
    r.detail = std::to_string(pairs) + " pairs x " + std::to_string(runs) +
               " runs at eps 0.05; worst coverage full " + std::to_string(worst_full) +
               "/100, marginal " + std::to_string(worst_marg) + "/100 (need " +
               std::to_string(need) + ")";
  });
}

// ---- 6 ----

namespace {

// Pair below the relative threshold with lemma parameters.
std::pair<SpinSystem, SpinSystem> basic_pair(Rng& rng, std::size_t k) {
  const auto kind = k % 2 ? ModelKind::ising : ModelKind::hardcore;
  const std::size_t n = 3 + k % 6;
  const GraphPtr g = share(t::random_graph(n, 0.5, 3, rng));
  if (kind == ModelKind::hardcore) {
    auto mu = t::random_hardcore(g, 0.3, 2.0, rng);
    const double b = marginal_lower_bound(mu).b;
    const double theta = relative_threshold(kind, b, n, g->num_edges());
    for (double f = 0.8;; f *= 0.7) {
      auto nu = t::perturb(mu, f * theta, rng, 1e-3);
      const auto p = meta_condition_params(mu, nu, lower_bound_b(mu, nu));
      if (p.holds && p.d_par > 0) return {SpinSystem(mu), SpinSystem(nu)};
    }
  }
  auto mu = t::random_ising(g, 0.5, 0.5, rng);
  const double theta = relative_threshold(kind, 0, n, g->num_edges());
  auto nu = t::perturb(mu, 0.8 * theta, 0.8 * theta, rng);
  return {SpinSystem(mu), SpinSystem(nu)};
}

}  // namespace

CriterionResult check_basic_coverage(const SuiteOptions& opt) {
  return timed("C6", "basic relative estimator coverage", 600, [&](CriterionResult& r) {
    const double eps = 0.25;
    const std::size_t pairs = 10, runs = 100, need = 85;
    // The lemma sample count is astronomically large at this scale; c_T
    // rescales it per pair to this many draws.
    const double target_T = 20000;
    std::size_t worst = runs, bad = 0;
    double max_K = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto seed = case_seed(opt, kTagBasic, k);
      Rng rng(seed);
      const auto [mu, nu] = basic_pair(rng, k);
      const auto params = meta_condition_params(mu, nu, lower_bound_b(mu, nu));
      max_K = std::max(max_K, params.K);
      EstimatorBudget budget;
      budget.exec = opt.exec;
      budget.c_T = target_T / (1e4 * params.L * params.L * params.K * params.K / (eps * eps));
      const double tv = exact_tv(mu, nu);
      std::size_t hits = 0;
      for (std::size_t run = 0; run < runs; ++run) {
        const auto rs = derive_seed(seed, run + 1);
        Rng rr(rs);
        const auto e = basic_relative_tv(mu, nu, eps, params, budget, rr);
        const bool ok = std::abs(e.estimate - tv) <= eps * tv;
        hits += ok;
        r.rows.push_back(row("estimator-accuracy",
                             "C6-" + std::to_string(k) + "-" + std::to_string(run), rs,
                             static_cast<double>(e.samples_used), e.estimate, tv, ok));
      }
      worst = std::min(worst, hits);
      if (hits < need) {
        ++bad;
        r.failures.push_back("pair " + std::to_string(k) + " seed " + std::to_string(seed));
      }
    }
    r.passed = bad == 0;
    r.detail = std::to_string(pairs) + " pairs x " + std::to_string(runs) +
               " runs at eps 0.25, T = 2e4 via c_T (lemma K up to " + fmt(max_K, 3) +
               "); worst coverage " + std::to_string(worst) + "/100 (need " +
               std::to_string(need) + ")";
  });
}

// ---- 7 ----

namespace {

struct AdvancedCase {
  HardcoreModel mu;
  HardcoreModel nu;
  double kappa;
  double theta;
};

AdvancedCase advanced_case(Rng& rng, std::size_t k, double eps) {
  static constexpr std::size_t sizes[] = {6, 8, 6, 7, 8, 9, 10, 6, 8, 10};
  const std::size_t n = sizes[k];
  const double nn = static_cast<double>(n);
  const double kappa = desk_kappa(eps, n, 4);
  const double theta = kappa / (20.0 * nn);
  if (k == 0) {
    // every field below kappa: lambda = 1e-6 on one side, D = 1e-8
    const GraphPtr g = share(t::random_graph(n, 0.5, 3, rng));
    std::vector<double> lm(n, 1e-6), ln(n, 1e-6);
    for (Vertex v = 0; v < n; ++v) ln[v] += v % 2 ? 1e-8 : -1e-8;
    return {HardcoreModel(g, lm), HardcoreModel(g, ln), kappa, theta};
  }
  if (k == 1) {
    auto c = small_field_case(rng, n, kappa, theta, 0.0, 3);
    return {std::move(c.mu), std::move(c.nu), kappa, theta};
  }
  auto c = small_field_case(rng, n, kappa, theta, 0.7, 3);
  return {std::move(c.mu), std::move(c.nu), kappa, theta};
}

}  // namespace

CriterionResult check_advanced_coverage(const SuiteOptions& opt) {
  return timed("C7", "advanced estimator at desk scale", 900, [&](CriterionResult& r) {
    const double eps = 0.25;
    const std::size_t pairs = 10, runs = 100, need = 85;
    std::size_t worst = runs, bad = 0, below_kappa = 0, naive_zero = 0, naive_runs = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto seed = case_seed(opt, kTagAdvanced, k);
      Rng rng(seed);
      const auto c = advanced_case(rng, k, eps);
      const SpinSystem mu = c.mu, nu = c.nu;
      EstimatorBudget budget;
      budget.exec = opt.exec;
      budget.t = 4;
      budget.kappa_override = c.kappa;
      budget.theta_override = c.theta;
      budget.c_T = 0.01;
      const auto gates = advanced_gates(c.mu, c.nu, eps, 4, c.kappa, c.theta);
      const auto part = partition_big_small(c.mu, c.nu, c.kappa);
      below_kappa += part.big.empty();
      const double tv = exact_tv(mu, nu);
      std::size_t hits = 0;
      bool gate_ok = gates.failures().empty();
      for (std::size_t run = 0; run < runs; ++run) {
        const auto rs = derive_seed(seed, run + 1);
        Rng rr(rs);
        const auto e = advanced_relative_tv(mu, nu, eps, budget, rr);
        gate_ok = gate_ok && e.warnings.empty();
        const bool ok = std::abs(e.estimate - tv) <= eps * tv;
        hits += ok;
        r.rows.push_back(row("estimator-accuracy",
                             "C7-" + std::to_string(k) + "-" + std::to_string(run), rs,
                             static_cast<double>(e.samples_used), e.estimate, tv, ok));
      }
      if (part.big.empty()) {
        // the W estimator on the same pair, exact partition functions
        const double lzm = exact_partition(mu), lzn = exact_partition(nu);
        for (std::size_t run = 0; run < 10; ++run) {
          Rng rr(derive_seed(seed, 1000 + run));
          naive_zero += w_deviation_estimate(mu, nu, lzm, lzn, 20000, budget, rr) == 0.0;
          ++naive_runs;
        }
      }
      worst = std::min(worst, hits);
      if (hits < need || !gate_ok) {
        ++bad;
        r.failures.push_back("pair " + std::to_string(k) + " seed " + std::to_string(seed) +
                             (gate_ok ? "" : " (gate warning)"));
      }
    }
    r.passed = bad == 0 && below_kappa >= 2;
    r.detail = std::to_string(pairs) + " pairs (" + std::to_string(below_kappa) +
               " with every field below kappa) x " + std::to_string(runs) +
               " runs, t = 4, c_T = 0.01; worst coverage " + std::to_string(worst) +
               "/100 (need " + std::to_string(need) + "); W estimator returned 0 in " +
               std::to_string(naive_zero) + "/" + std::to_string(naive_runs) +
               " runs on the small-field pairs";
  });
}

// ---- 8 ----

CriterionResult check_counter(const SuiteOptions& opt) {
  return timed("C8", "counting oracle contract", 300, [&](CriterionResult& r) {
    const double eps = 0.05;
    const std::size_t runs = 100, need = 97;
    std::vector<std::pair<std::string, SpinSystem>> inst;
    {
      Rng rng(case_seed(opt, kTagCounter, 0));
      inst.emplace_back("hardcore-path3", HardcoreModel(share(t::path_graph(3)), {1, 1, 1}));
      inst.emplace_back("hardcore-cycle10",
                        HardcoreModel(share(t::cycle_graph(10)), std::vector<double>(10, 1.0)));
      inst.emplace_back("hardcore-random10",
                        t::random_hardcore(share(t::random_graph(10, 0.4, 3, rng)), 0.5, 2.0, rng));
      inst.emplace_back("ising-random8",
                        t::random_ising(share(t::random_graph(8, 0.5, 3, rng)), 0.5, 0.5, rng));
      inst.emplace_back("ising-cycle6",
                        IsingModel(share(t::cycle_graph(6)), std::vector<double>(6, 0.3),
                                   std::vector<ExtendedReal>(6, ExtendedReal(0.1))));
    }
    CounterConfig cfg;
    cfg.exact_cap = 0;
    cfg.exec = opt.exec;
    std::size_t worst = runs, bad = 0;
    double worst_tele = 0.0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
      const auto& [name, s] = inst[k];
      const double Z = t::bf_partition(s);
      const auto sched = count_schedule(s, cfg.levels_multiplier);
      const auto ratios = exact_level_ratios(sched);
      double lz = sched.log_Z_base;
      for (std::size_t i = 0; i < ratios.size(); ++i)
        lz += (sched.reverse_first && i == 0) ? -std::log(ratios[i]) : std::log(ratios[i]);
      const double tele = std::abs(std::exp(lz) - Z) / Z;
      worst_tele = std::max(worst_tele, tele);
      std::size_t hits = 0;
      for (std::size_t run = 0; run < runs; ++run) {
        const auto rs = case_seed(opt, kTagCounter, 1 + k * runs + run);
        Rng rr(rs);
        const double zhat = std::exp(approx_count(s, eps, cfg, rr));
        const bool ok = zhat >= (1 - eps) * Z && zhat <= (1 + eps) * Z;
        hits += ok;
        r.rows.push_back(row("estimator-accuracy", "C8-" + name + "-" + std::to_string(run), rs,
                             eps, zhat, Z, ok));
      }
      worst = std::min(worst, hits);
      if (hits < need || tele > 1e-10) {
        ++bad;
        r.failures.push_back(name);
      }
    }
    r.passed = bad == 0;
    r.detail = std::to_string(inst.size()) + " instances x " + std::to_string(runs) +
               " runs at eps 0.05; worst coverage " + std::to_string(worst) + "/100 (need " +
               std::to_string(need) + "); max telescoping rel err " + fmt(worst_tele, 3);
  });
}

// ---- 9 ----

namespace {

// All connected graphs with max degree <= 3 on n vertices, one per
// isomorphism class.
std::vector<Graph> connected_subcubic_graphs(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> slots;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) slots.emplace_back(u, v);
  std::set<std::uint64_t> seen;
  std::vector<Graph> out;
  std::vector<std::size_t> perm(n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << slots.size()); ++m) {
    std::vector<int> deg(n, 0);
    std::vector<std::uint32_t> adj(n, 0);
    bool ok = true;
    for (std::size_t i = 0; i < slots.size() && ok; ++i) {
      if (!((m >> i) & 1)) continue;
      auto [u, v] = slots[i];
      ok = ++deg[u] <= 3 && ++deg[v] <= 3;
      adj[u] |= 1u << v;
      adj[v] |= 1u << u;
    }
    if (!ok) continue;
    // every class has a representative with non-increasing degrees
    if (!std::is_sorted(deg.begin(), deg.end(), std::greater<>())) continue;
    std::uint32_t reach = 1, frontier = 1;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::size_t v = 0; v < n; ++v)
        if ((frontier >> v) & 1) next |= adj[v];
      frontier = next & ~reach;
      reach |= next;
    }
    if (reach != (1u << n) - 1) continue;
    // canonical code: minimum edge mask over all relabelings
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::uint64_t best = ~std::uint64_t{0};
    do {
      bool keeps = true;
      for (std::size_t i = 0; i < n && keeps; ++i) keeps = deg[perm[i]] == deg[i];
      if (!keeps) continue;
      std::uint64_t code = 0;
      for (std::size_t i = 0; i < slots.size(); ++i)
        if ((adj[perm[slots[i].first]] >> perm[slots[i].second]) & 1) code |= std::uint64_t{1} << i;
      best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!seen.insert(best).second) continue;
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if ((m >> i) & 1) e.push_back(slots[i]);
    out.push_back(Graph::from_edges(n, e));
  }
  return out;
}

}  // namespace

CriterionResult check_reduction(const SuiteOptions&) {
  return timed("C9", "counting through TV queries", 300, [&](CriterionResult& r) {
    std::size_t graphs = 0, bad = 0;
    std::map<std::size_t, std::size_t> per_n;
    for (std::size_t n = 1; n <= 7; ++n) {
      const auto gs = connected_subcubic_graphs(n);
      per_n[n] = gs.size();
      for (std::size_t i = 0; i < gs.size(); ++i) {
        const auto truth = t::bf_independent_sets(gs[i]);
        CountViaTvOptions with, without;
        without.low_degree_shortcut = false;
        const auto a = count_via_tv_queries(gs[i], with);
        const auto b = count_via_tv_queries(gs[i], without);
        const bool ok = a.count == truth && b.count == truth;
        ++graphs;
        if (!ok) {
          ++bad;
          r.failures.push_back("n " + std::to_string(n) + " graph " + std::to_string(i));
        }
        r.rows.push_back(row("reduction-demo",
                             "C9-n" + std::to_string(n) + "-" + std::to_string(i), 0,
                             static_cast<double>(b.tv_queries), static_cast<double>(b.count),
                             static_cast<double>(truth), ok));
      }
    }
    std::string counts;
    for (auto [n, c] : per_n) counts += (counts.empty() ? "" : ",") + std::to_string(c);
    r.passed = bad == 0;
    r.detail = std::to_string(graphs) + " graphs (per n = 1..7: " + counts + "), " +
               std::to_string(bad) + " mismatches, with and without the degree-2 shortcut";
  });
}

// ---- 10 ----

CriterionResult check_marginal_bound(const SuiteOptions& opt) {
  return timed("C10", "marginal lower bound b", 300, [&](CriterionResult& r) {
    const std::size_t cases = 120;
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagMarginalBound, k);
      Rng rng(seed);
      const std::size_t n = 1 + rng() % 8;
      const GraphPtr g = share(t::random_graph(n, 0.5, 4, rng));
      SpinSystem s = HardcoreModel(g, std::vector<double>(n, 1.0));
      switch (k % 4) {
        case 0: s = t::random_hardcore(g, 0.05, 3.0, rng); break;
        case 1: {
          auto lam = t::random_hardcore(g, 0.05, 3.0, rng).lambda();
          lam[rng() % n] = 0.0;
          s = HardcoreModel(g, lam);
          break;
        }
        case 2: s = t::random_ising(g, 1.0, 1.0, rng); break;
        default: {
          auto m = t::random_ising(g, 1.0, 1.0, rng);
          auto h = m.fields();
          if (n > 1) h[rng() % n] = rng() % 2 ? ExtendedReal::pos_infinity() : ExtendedReal::neg_infinity();
          s = IsingModel(g, m.edge_couplings(), h);
        }
      }
      const double b = marginal_lower_bound(s).b;
      const double truth = t::bf_marginal_bound(s);
      const double err = std::abs(b - truth) / truth;
      worst = std::max(worst, err);
      const bool ok = err <= 1e-10;
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("oracle-equivalence", "C10-" + std::to_string(k), seed, 0, b, truth, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " models, " + std::to_string(bad) +
               " mismatches; max rel err " + fmt(worst, 3);
  });
}

// ---- extra checks ----

CriterionResult check_variance_gate(const SuiteOptions& opt) {
  return timed("VG", "W variance gate", 120, [&](CriterionResult& r) {
    const std::size_t cases = 200;
    std::size_t bad = 0;
    double worst_var = 0.0, min_mean = 1e300;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagVarianceGate, k);
      Rng rng(seed);
      const auto [mu, nu] = basic_pair(rng, k);
      const auto p = meta_condition_params(mu, nu, lower_bound_b(mu, nu));
      const WMoments w = exact_w_moments(mu, nu);
      const double tv = t::bf_tv(mu, nu);
      const double sd = std::sqrt(std::max(0.0, w.variance));
      const bool ok = sd <= p.K * tv && w.mean >= 1.0 / p.L;
      worst_var = std::max(worst_var, sd / (p.K * tv));
      min_mean = std::min(min_mean, w.mean);
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("lemma-bounds", "VG-" + std::to_string(k), seed, p.K, sd, p.K * tv, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " pairs below threshold, " + std::to_string(bad) +
               " violations; max sd(W)/(K TV) " + fmt(worst_var, 3) + ", min E[W] " +
               fmt(min_mean, 4);
  });
}

// Empirical constant for Var_{mu_B}(f) <= c d^2 (n^3 + n/kappa), fixed from
// the seeded instances below with headroom; a failure means drift.
inline constexpr double kFVarianceConstant = 0.05;

CriterionResult check_f_variance(const SuiteOptions& opt) {
  return timed("FV", "f variance regression guard", 120, [&](CriterionResult& r) {
    const std::size_t cases = 100;
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < cases; ++k) {
      const auto seed = case_seed(opt, kTagFVariance, k);
      Rng rng(seed);
      const std::size_t n = 2 + rng() % 9;
      const double nn = static_cast<double>(n);
      const double kappa = 1.0 / (20.0 * nn);
      const auto c = small_field_case(rng, n, kappa, kappa / (20.0 * nn), 0.6);
      const auto part = partition_big_small(c.mu, c.nu, kappa);
      const auto pt = pattern_table(c.mu, c.nu, part);
      double m2 = 0.0;
      for (auto x : pt.patterns) m2 += pt.sum_mu[x] / pt.Z_mu * pt.f[x] * pt.f[x];
      const double var = std::max(0.0, m2 - pt.tv * pt.tv);
      const double scale = pt.tv * pt.tv * (nn * nn * nn + nn / kappa);
      const double ratio = var / scale;
      worst = std::max(worst, ratio);
      const bool ok = ratio <= kFVarianceConstant;
      if (!ok) {
        ++bad;
        r.failures.push_back("case " + std::to_string(k) + " seed " + std::to_string(seed));
      }
      r.rows.push_back(row("variance-guard", "FV-" + std::to_string(k), seed, kappa, var, scale, ok));
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " pairs; max Var(f)/(d^2 (n^3 + n/kappa)) " +
               fmt(worst, 3) + " against guard " + fmt(kFVarianceConstant, 3);
  });
}

CriterionResult check_budget_shapes(const SuiteOptions&) {
  return timed("BS", "sample budget shapes", 10, [&](CriterionResult& r) {
    std::vector<std::string> bad;
    auto near = [](double a, double b, double tol) { return std::abs(a / b - 1) <= tol; };
    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) bad.push_back(what);
      r.rows.push_back(row("variance-guard", "BS-" + what, 0, 0, ok, 1, ok));
    };
    auto d = [](std::size_t x) { return static_cast<double>(x); };
    for (double eps : {0.2, 0.05, 0.01})
      expect(near(d(additive_sample_count(eps / 2)), 4 * d(additive_sample_count(eps)), 1e-3),
             "additive-eps^-2-" + fmt(eps));
    expect(near(d(basic_sample_count(200, 2, 0.1, 1)), 4 * d(basic_sample_count(100, 2, 0.1, 1)), 1e-6),
           "basic-K^2");
    expect(near(d(basic_sample_count(100, 4, 0.1, 1)), 4 * d(basic_sample_count(100, 2, 0.1, 1)), 1e-6),
           "basic-L^2");
    expect(near(d(basic_sample_count(100, 2, 0.05, 1)), 4 * d(basic_sample_count(100, 2, 0.1, 1)), 1e-6),
           "basic-eps^-2");
    for (std::size_t n : {10, 100, 1000})
      for (double kappa : {1e-3, 1e-6}) {
        const double nn = d(n);
        expect(near(d(advanced_sample_count(n, kappa, 0.1, 1)) * 0.01, nn * nn * nn + nn / kappa, 1e-6),
               "advanced-n" + std::to_string(n) + "-k" + fmt(kappa));
      }
    expect(near(d(samples_per_level(40, 0.01, {})), 40 / 1e-4, 1e-6), "counter-levels/eps^2");
    expect(near(d(samples_per_level(80, 0.01, {})), 2 * d(samples_per_level(40, 0.01, {})), 1e-6),
           "counter-linear-in-levels");
    for (std::size_t f : {100, 10000}) {
      const double want = 20 * d(f) * std::log(d(f) / 1e-6);
      expect(near(d(glauber_steps(f, 1e-6, 20)), want, 1e-3), "glauber-f-log-f/delta-" + std::to_string(f));
    }
    {
      const std::size_t n = 200;
      const SpinSystem hc = HardcoreModel(share(t::cycle_graph(n)), std::vector<double>(n, 1.0));
      const double levels = d(count_schedule(hc, 1.0).models.size() - 1);
      // one reverse level plus ceil(n ln(1 + lambda_max))
      expect(levels == 1 + std::ceil(d(n) * std::log(2.0)), "counter-hardcore-levels");
      const SpinSystem is = IsingModel(share(t::cycle_graph(n)), std::vector<double>(n, 0.5),
                                       std::vector<ExtendedReal>(n, ExtendedReal(0.25)));
      expect(d(count_schedule(is, 1.0).models.size() - 1) == std::ceil(d(2 * n) * 0.5),
             "counter-ising-levels");
    }
    r.passed = bad.empty();
    r.failures = bad;
    r.detail = std::to_string(r.rows.size()) + " shape assertions, " + std::to_string(bad.size()) +
               " failing";
  });
}

// ---- suites ----

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracle-equivalence", "lemma-bounds",
                                              "estimator-accuracy", "reduction-demo",
                                              "variance-guard"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& ns = suite_names();
  return std::find(ns.begin(), ns.end(), name) != ns.end();
}

std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opt) {
  using Fn = CriterionResult (*)(const SuiteOptions&);
  static const std::map<std::string, std::vector<Fn>> table{
      {"oracle-equivalence", {check_w_identity, check_truncation, check_marginal_bound}},
      {"lemma-bounds", {check_lower_bound, check_small_field_lemmas, check_variance_gate}},
      {"estimator-accuracy",
       {check_additive_coverage, check_basic_coverage, check_advanced_coverage, check_counter}},
      {"reduction-demo", {check_reduction}},
      {"variance-guard", {check_f_variance, check_budget_shapes}},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidInput("unknown suite '" + name + "'");
  std::vector<CriterionResult> out;
  for (Fn f : it->second) out.push_back(f(opt));
  return out;
}

void print_results(std::ostream& os, const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs) {
    os << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(4) << r.id << ' ' << r.name
       << " (" << std::fixed << std::setprecision(1) << r.seconds << "s / limit "
       << r.limit_seconds << "s): " << r.detail << '\n';
    os.unsetf(std::ios::floatfield);
    for (std::size_t i = 0; i < r.failures.size() && i < 10; ++i)
      os << "     failing: " << r.failures[i] << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<CriterionResult>& rs) {
  os << "suite,case_id,seed,budget,estimate,truth,abs_err,rel_err,pass\n";
  os << std::setprecision(17);
  for (const auto& r : rs)
    for (const auto& c : r.rows)
      os << c.suite << ',' << c.case_id << ',' << c.seed << ',' << c.budget << ',' << c.estimate
         << ',' << c.truth << ',' << c.abs_err << ',' << c.rel_err << ',' << (c.pass ? 1 : 0)
         << '\n';
}

}  // namespace gibbstv
