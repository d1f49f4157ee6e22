#include <doctest.h>

#include <cmath>

#include "gibbstv/errors.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/regime.hpp"
#include "helpers.hpp"

using namespace gibbstv;

namespace {

EstimatorBudget serial_budget() {
  EstimatorBudget b;
  b.exec = Execution::serial;
  return b;
}

}  // namespace

TEST_CASE("sample count helpers") {
  CHECK(additive_sample_count(0.1) == 6400);
  CHECK(basic_sample_count(10, 2, 0.5, 1) == static_cast<std::size_t>(std::ceil(1e4 * 4 * 100 / 0.25)));
  CHECK(advanced_sample_count(10, 0.01, 0.5, 1) == 8000);
  CHECK(median_repeats(0.5) == 1);
  CHECK(median_repeats(1.0 / 3.0) == 1);
  CHECK(median_repeats(0.01) == 83);
  CHECK(median_repeats(0.01) % 2 == 1);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("additive estimator examples") {
  auto budget = serial_budget();
  const auto p3 = share(gt::path_graph(3));
  Rng rng(1);
  const auto same = uniform_hardcore(p3, 1.2);
  CHECK(additive_tv(same, same, 0.1, budget, rng).estimate <= 0.1);

  const auto one = make_graph(1, {});
  int hits = 0;
  for (int i = 0; i < 30; ++i) {
    const double d = additive_tv(hardcore(one, {1.0}), hardcore(one, {3.0}), 0.05, budget, rng).estimate;
    hits += d >= 0.2 && d <= 0.3;
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
  CHECK(hits >= 20);

  const auto c4 = share(gt::cycle_graph(4));
  const auto mu = ising(c4, {0.3, -0.2, 0.1, 0.4}, {0.1, 0.0, -0.1, 0.2});
  const auto nu = ising(c4, {0.3, -0.2, 0.1, 0.4}, {0.6, 0.0, -0.1, 0.2});
  const double tv = exact_tv(mu, nu);
  hits = 0;
  for (int i = 0; i < 30; ++i) hits += std::abs(additive_tv(mu, nu, 0.05, budget, rng).estimate - tv) <= 0.05;
  CHECK(hits >= 20);
}

TEST_CASE("marginal additive estimator examples") {
  auto budget = serial_budget();
  Rng rng(2);
  const auto p3 = share(gt::path_graph(3));
  const auto mu = uniform_hardcore(p3, 1.0), nu = hardcore(p3, {1.0, 2.0, 1.0});
  CHECK(marginal_additive_tv(mu, nu, std::span<const Vertex>{}, 0.05, budget, rng).estimate == 0.0);
  const Vertex mid[] = {1}, all[] = {0, 1, 2};
  const double truth = exact_marginal_tv(mu, nu, mid);
  int hits = 0;
  for (int i = 0; i < 20; ++i)
    hits += std::abs(marginal_additive_tv(mu, nu, mid, 0.05, budget, rng).estimate - truth) <= 0.05;
  CHECK(hits >= 14);
  // full projection: same target as additive_tv
  const double tv = exact_tv(mu, nu);
  double a = 0, m = 0;
  for (int i = 0; i < 10; ++i) {
    a += additive_tv(mu, nu, 0.05, budget, rng).estimate;
    m += marginal_additive_tv(mu, nu, all, 0.05, budget, rng).estimate;
  }
  CHECK(std::abs(a / 10 - tv) <= 0.02);
  CHECK(std::abs(m / 10 - tv) <= 0.02);
  const Vertex twice[] = {1, 1};
  CHECK_THROWS_AS(marginal_additive_tv(mu, nu, twice, 0.05, budget, rng), InvalidInput);
}

TEST_CASE("meta-condition parameters") {
  Rng rng(3);
  {
    // n = 10 hardcore, b = 1/3: K = 3240
    const auto g = share(gt::path_graph(10));
    const SpinSystem mu = uniform_hardcore(g, 0.5), nu = uniform_hardcore(g, 0.5);
    const auto p = meta_condition_params(mu, nu, 1.0 / 3.0);
    CHECK(p.K == doctest::Approx(3240));
    CHECK(p.L == 2);
    CHECK(p.C_tv_par == doctest::Approx(1.0 / 27));
    CHECK(p.holds);
  }
  {
    const auto c4 = share(gt::cycle_graph(4));
    const std::vector<ExtendedReal> h(4, 0.0);
    const SpinSystem mu = ising(c4, {0.1, 0.1, 0.1, 0.1}, h);
    const auto p = meta_condition_params(mu, mu, 0.5);
    CHECK(p.K == doctest::Approx(256));
    CHECK(p.theta == doctest::Approx(1.0 / (2 * (4 + 12))));
  }
  {
    const auto g = share(gt::path_graph(4));
    const auto p = meta_condition_params(uniform_hardcore(g, 0.5), uniform_hardcore(g, 0.8), 0.3);
    CHECK_FALSE(p.holds);
    Rng r(4);
    CHECK_THROWS_AS(basic_relative_tv(uniform_hardcore(g, 0.5), uniform_hardcore(g, 0.8), 0.2, p,
                                      serial_budget(), r),
                    GateError);
  }
}

TEST_CASE("basic relative estimator examples") {
  Rng rng(5);
  const auto one = make_graph(1, {});
  {
    const auto mu = hardcore(one, {1.0});
    const auto p = meta_condition_params(mu, mu, marginal_lower_bound(mu).b);
    auto budget = serial_budget();
    budget.c_T = 1e-4;
    CHECK(basic_relative_tv(mu, mu, 0.2, p, budget, rng).estimate == 0.0);
  }
  {
    const auto mu = hardcore(one, {1.0}), nu = hardcore(one, {1.01});
    const double b = std::min(marginal_lower_bound(mu).b, marginal_lower_bound(nu).b);
    const auto p = meta_condition_params(mu, nu, b);
    REQUIRE(p.holds);
    auto budget = serial_budget();
    budget.c_T = 2e4 / static_cast<double>(basic_sample_count(p.K, p.L, 0.2, 1));
    const double truth = 0.01 / 4.02;
    CHECK(exact_tv(mu, nu) == doctest::Approx(truth).epsilon(1e-12));
    int hits = 0;
    for (int i = 0; i < 30; ++i)
      hits += std::abs(basic_relative_tv(mu, nu, 0.2, p, budget, rng).estimate - truth) <= 0.2 * truth;
    CHECK(hits >= 20);
  }
  {
    const auto edge = make_graph(2, {{0, 1}});
    const auto mu = uniform_hardcore(edge, 0.5), nu = uniform_hardcore(edge, 0.502);
    const double b = std::min(marginal_lower_bound(mu).b, marginal_lower_bound(nu).b);
    const auto p = meta_condition_params(mu, nu, b);
    REQUIRE(p.holds);
    auto budget = serial_budget();
    budget.c_T = 2e4 / static_cast<double>(basic_sample_count(p.K, p.L, 0.25, 1));
    const double truth = exact_tv(mu, nu);
    int hits = 0;
    for (int i = 0; i < 30; ++i)
      hits += std::abs(basic_relative_tv(mu, nu, 0.25, p, budget, rng).estimate - truth) <= 0.25 * truth;
    CHECK(hits >= 20);
  }
}

TEST_CASE("budget guard refuses oversized runs") {
  const auto one = make_graph(1, {});
  const auto mu = hardcore(one, {1.0}), nu = hardcore(one, {1.01});
  const auto p = meta_condition_params(mu, nu, 0.49);
  Rng rng(6);
  CHECK_THROWS_AS(basic_relative_tv(mu, nu, 0.2, p, serial_budget(), rng), GateError);
}

TEST_CASE("dispatcher branches") {
  auto budget = serial_budget();
  Rng rng(7);
  const auto edge = make_graph(2, {{0, 1}});
  {
    const auto mu = ising(edge, {0.2}, {ExtendedReal::pos_infinity(), 0.0});
    const auto nu = ising(edge, {0.2}, {ExtendedReal::neg_infinity(), 0.0});
    const auto r = dispatch_tv(mu, nu, 0.1, budget, rng);
    CHECK(r.estimate == 1.0);
    CHECK(r.branch == "preprocess-resolved");
  }
  {
    const auto g = share(gt::path_graph(5));
    const auto mu = uniform_hardcore(g, 0.5), nu = hardcore(g, {0.5, 0.8, 0.5, 0.5, 0.5});
    CHECK(plan_dispatch(mu, nu, 0.1, budget).branch == "additive-gated");
    auto eb = budget;
    eb.exact = true;
    const auto r = dispatch_tv(mu, nu, 0.1, eb, rng);
    CHECK(r.branch == "exact");
    CHECK(r.estimate == doctest::Approx(gt::bf_tv(mu, nu)).epsilon(1e-12));
    auto ab = budget;
    ab.mode = Mode::additive;
    CHECK(plan_dispatch(mu, nu, 0.1, ab).branch == "additive");
  }
  {
    // n = 30 with D = 1e-9: advanced once theta is set above D
    const auto g = share(gt::path_graph(30));
    std::vector<double> lam(30, 0.5);
    const auto mu = hardcore(g, lam);
    lam[4] += 1e-9;
    const auto nu = hardcore(g, lam);
    auto ob = budget;
    ob.theta_override = 1e-8;
    CHECK(plan_dispatch(mu, nu, 0.1, ob).branch == "advanced");
    // the default threshold 1e-10 eps^(1/4) / n^(5/2) is far below 1e-9
    CHECK(plan_dispatch(mu, nu, 0.1, budget).branch == "basic-relative");
  }
  {
    const auto mu = hardcore(edge, {0.0, 1.0}), nu = hardcore(edge, {0.4, 1.0});
    const auto p = plan_dispatch(mu, nu, 0.1, budget);
    CHECK(p.branch == "additive-big-gap");
    CHECK(p.inner_epsilon == doctest::Approx(p.b * 0.1));
  }
  {
    auto rb = budget;
    rb.failure_prob = 0.01;
    const auto g = share(gt::path_graph(3));
    CHECK(plan_dispatch(uniform_hardcore(g, 1), uniform_hardcore(g, 2), 0.1, rb).repeats == 83);
  }
}

TEST_CASE("same seed reproduces an estimate bit for bit") {
  const auto g = share(gt::cycle_graph(7));
  const auto mu = uniform_hardcore(g, 1.0), nu = uniform_hardcore(g, 1.3);
  auto budget = serial_budget();
  budget.mode = Mode::additive;
  Rng a(42), b(42);
  CHECK(dispatch_tv(mu, nu, 0.1, budget, a).estimate == dispatch_tv(mu, nu, 0.1, budget, b).estimate);
}
