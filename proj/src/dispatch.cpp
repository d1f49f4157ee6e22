#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gibbstv/errors.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/exact.hpp"

namespace gibbstv {

namespace {

struct SoftQuantities {
  double b = 0.0;
  double C = 0.0;
  double theta = 0.0;
  double d_par = 0.0;
  bool unique_both = false;
};

SoftQuantities soft_quantities(const SpinSystem& mu, const SpinSystem& nu,
                               const EstimatorBudget& budget) {
  SoftQuantities q;
  q.b = std::min(marginal_lower_bound(mu, budget.free_degree_cap).b,
                 marginal_lower_bound(nu, budget.free_degree_cap).b);
  LowerBoundCase lc;
  lc.marginal_bound = q.b;
  if (kind_of(mu) == ModelKind::hardcore) {
    const auto& a = std::get<HardcoreModel>(mu);
    const auto& c = std::get<HardcoreModel>(nu);
    lc.hardcore_uniqueness = uniqueness_for_lower_bound(a) && uniqueness_for_lower_bound(c);
    q.unique_both = check_uniqueness(a).has_value() && check_uniqueness(c).has_value();
  }
  q.C = tv_lower_bound_constant(kind_of(mu), lc);
  q.theta = relative_threshold(kind_of(mu), q.b, num_vertices(mu), graph_of(mu).num_edges());
  q.d_par = parameter_distance(mu, nu);
  return q;
}

void fill_basic(DispatchPlan& p, const SpinSystem& mu, const SpinSystem& nu, double eps,
                double b, const EstimatorBudget& budget) {
  const MetaConditionParams mp = meta_condition_params(mu, nu, b);
  if (!mp.holds) throw GateError("basic relative estimator: " + mp.reason);
  p.branch = "basic-relative";
  p.error_kind = ErrorKind::relative;
  p.K = mp.K;
  p.L = mp.L;
  p.inner_epsilon = eps;
  p.planned_samples = basic_sample_count(mp.K, mp.L, eps, budget.c_T);
}

}  // namespace

DispatchPlan plan_dispatch(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget) {
  require_same_pair(mu, nu);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  DispatchPlan p;
  p.repeats = median_repeats(budget.failure_prob);
  if (num_vertices(mu) == 0) {
    p.branch = "trivial";
    p.repeats = 1;
    return p;
  }
  if (budget.exact) {
    p.branch = "exact";
    p.repeats = 1;
    return p;
  }
  if (budget.mode == Mode::additive || budget.mode == Mode::marginal_additive) {
    p.branch = budget.mode == Mode::additive ? "additive" : "marginal-additive";
    p.inner_epsilon = eps;
    p.planned_samples = additive_sample_count(eps);
    p.mu = mu;
    p.nu = nu;
    return p;
  }
  PreprocessOutcome pre = preprocess(mu, nu);
  if (pre.kind == PreprocessOutcome::Kind::resolved) {
    p.branch = "preprocess-resolved";
    p.resolved_value = pre.tv;
    p.repeats = 1;
    return p;
  }
  if (pre.kind == PreprocessOutcome::Kind::big_gap) {
    if (budget.mode != Mode::automatic)
      throw GateError("pair has a field that is forced on one side only; use auto or additive mode");
    p.branch = "additive-big-gap";
    p.error_kind = ErrorKind::relative;
    p.b = pre.big_gap_b;
    p.inner_epsilon = pre.big_gap_b * eps;
    p.planned_samples = additive_sample_count(p.inner_epsilon);
    p.mu = mu;
    p.nu = nu;
    return p;
  }
  const SpinSystem& rmu = *pre.mu;
  const SpinSystem& rnu = *pre.nu;
  p.mu = rmu;
  p.nu = rnu;
  const std::size_t n = num_vertices(rmu);
  if (n == 0) {
    p.branch = "preprocess-resolved";
    p.repeats = 1;
    return p;
  }
  const SoftQuantities q = soft_quantities(rmu, rnu, budget);
  p.b = q.b;
  p.C_tv_par = q.C;
  p.theta = q.theta;
  p.d_par = q.d_par;
  if (budget.mode == Mode::basic_relative) {
    fill_basic(p, rmu, rnu, eps, q.b, budget);
    return p;
  }
  const bool hardcore = kind_of(rmu) == ModelKind::hardcore;
  if (budget.mode == Mode::advanced) {
    if (!hardcore) throw InvalidInput("the advanced estimator handles hardcore pairs only");
    p.branch = "advanced";
    p.error_kind = ErrorKind::relative;
    p.inner_epsilon = eps;
    return p;
  }
  const double theta_adv = budget.theta_override.value_or(default_advanced_theta(eps, n));
  if (hardcore && q.unique_both && n > budget.exact_cap && q.d_par < theta_adv) {
    p.branch = "advanced";
    p.error_kind = ErrorKind::relative;
    p.inner_epsilon = eps;
    p.theta = theta_adv;
    const double kappa = budget.kappa_override.value_or(default_kappa(eps, n));
    p.planned_samples = 2 * advanced_sample_count(n, kappa, eps, budget.c_T);
    return p;
  }
  if (q.d_par >= q.theta) {
    p.branch = "additive-gated";
    p.error_kind = ErrorKind::relative;
    p.inner_epsilon = q.theta * q.C * eps;
    p.planned_samples = additive_sample_count(p.inner_epsilon);
    return p;
  }
  fill_basic(p, rmu, rnu, eps, q.b, budget);
  return p;
}

EstimateReport dispatch_tv(const SpinSystem& mu, const SpinSystem& nu, double eps,
                           const EstimatorBudget& budget, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  DispatchPlan p = plan_dispatch(mu, nu, eps, budget);
  auto run_once = [&](Rng& r) -> EstimateReport {
    if (p.branch == "trivial" || p.branch == "preprocess-resolved") {
      EstimateReport rep;
      rep.estimate = p.resolved_value;
      return rep;
    }
    if (p.branch == "exact") {
      EstimateReport rep;
      rep.estimate = exact_tv(mu, nu, budget.exact_cap);
      return rep;
    }
    if (p.branch == "additive" || p.branch == "additive-big-gap" || p.branch == "additive-gated")
      return additive_tv(*p.mu, *p.nu, p.inner_epsilon, budget, r);
    if (p.branch == "marginal-additive") {
      std::vector<Vertex> all(num_vertices(mu));
      std::iota(all.begin(), all.end(), Vertex{0});
      return marginal_additive_tv(*p.mu, *p.nu, all, p.inner_epsilon, budget, r);
    }
    if (p.branch == "advanced") return advanced_relative_tv(*p.mu, *p.nu, eps, budget, r);
    MetaConditionParams mp = meta_condition_params(*p.mu, *p.nu, p.b);
    return basic_relative_tv(*p.mu, *p.nu, eps, mp, budget, r);
  };
  std::vector<double> estimates;
  EstimateReport rep;
  for (std::size_t k = 0; k < p.repeats; ++k) {
    Rng child(rng());
    EstimateReport one = run_once(child);
    estimates.push_back(one.estimate);
    if (k == 0) {
      rep = std::move(one);
    } else {
      rep.samples_used += one.samples_used;
      rep.counter_calls += one.counter_calls;
    }
  }
  rep.estimate = median(estimates);
  rep.branch = p.branch;
  rep.error_kind = p.error_kind;
  rep.repeats = p.repeats;
  if (p.branch != "advanced") {
    rep.d_par = p.d_par;
    rep.theta = p.theta;
  } else if (rep.theta == 0.0) {
    rep.theta = p.theta;
  }
  rep.b = p.b;
  rep.C_tv_par = p.C_tv_par;
  if (p.K > 0) {
    rep.K = p.K;
    rep.L = p.L;
  }
  rep.inner_epsilon = p.inner_epsilon;
  for (auto& w : p.warnings) rep.warnings.push_back(w);
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace gibbstv
