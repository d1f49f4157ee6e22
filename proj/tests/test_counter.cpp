#include <doctest.h>

#include <cmath>

#include "gibbstv/counter.hpp"
#include "gibbstv/errors.hpp"
#include "gibbstv/exact.hpp"
#include "helpers.hpp"

using namespace gibbstv;

namespace {

CounterConfig annealing_only() {
  CounterConfig c;
  c.exact_cap = 0;
  return c;
}

}  // namespace

TEST_CASE("P3 count lands in [4.5, 5.5] in at least 99% of trials") {
  const auto s = uniform_hardcore(share(gt::path_graph(3)), 1.0);
  const auto cfg = annealing_only();
  Rng rng(1);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    const double z = std::exp(approx_count(s, 0.1, cfg, rng));
    hits += z >= 4.5 && z <= 5.5;
  }
  CHECK(hits >= 198);
}

TEST_CASE("degenerate models are counted exactly") {
  const auto cfg = annealing_only();
  Rng rng(2);
  CHECK(approx_count(uniform_hardcore(share(gt::path_graph(4)), 0.0), 0.1, cfg, rng) == 0.0);
  const auto g3 = share(gt::path_graph(3));
  CHECK(approx_count(ising(g3, {0.0, 0.0}, {0.0, 0.0, 0.0}), 0.1, cfg, rng) ==
        doctest::Approx(std::log(8.0)).epsilon(1e-15));
}

TEST_CASE("conditional counts") {
  const auto cfg = annealing_only();
  Rng rng(3);
  const auto edge = make_graph(2, {{0, 1}});
  const auto s = uniform_hardcore(edge, 1.0);
  CHECK(std::exp(conditional_count(s, {1, 0}, 0.1, cfg, rng)) == doctest::Approx(1.0));
  CHECK(conditional_count(s, {1, 1}, 0.1, cfg, rng) == -INFINITY);
  // fully pinned feasible configuration: exact log weight
  Rng g0(4);
  const auto g = share(gt::random_graph(6, 0.5, 3, g0));
  const SpinSystem is = gt::random_ising(g, 1, 1, g0);
  const Configuration x{1, -1, -1, 1, 1, -1};
  CHECK(conditional_count(is, x, 0.1, cfg, rng) == doctest::Approx(log_weight(is, x)).epsilon(1e-12));
}

TEST_CASE("conditional count with an empty pinning behaves like approx_count") {
  const auto s = uniform_hardcore(share(gt::cycle_graph(8)), 1.3);
  const auto cfg = annealing_only();
  Rng rng(5);
  const int trials = 40;
  double a = 0, b = 0, a2 = 0, b2 = 0;
  for (int i = 0; i < trials; ++i) {
    const double x = approx_count(s, 0.1, cfg, rng);
    const double y = conditional_count(s, {}, 0.1, cfg, rng);
    a += x, a2 += x * x, b += y, b2 += y * y;
  }
  a /= trials, b /= trials;
  const double va = a2 / trials - a * a, vb = b2 / trials - b * b;
  const double se = std::sqrt((va + vb) / trials) + 1e-12;
  CHECK(std::abs(a - b) <= 4 * se);
  CHECK(std::abs(a - exact_partition(s)) <= 0.05);
}

TEST_CASE("telescoping identity with exact level expectations") {
  Rng rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = share(gt::random_graph(n, 0.5, 4, rng));
    const SpinSystem s = rep % 2 ? SpinSystem(gt::random_ising(g, 1.5, 1.5, rng))
                                 : SpinSystem(gt::random_hardcore(g, 0.1, 4, rng));
    const auto sched = count_schedule(s, 1.0);
    const auto r = exact_level_ratios(sched);
    double lz = sched.log_Z_base;
    for (std::size_t i = 0; i < r.size(); ++i)
      lz += sched.reverse_first && i == 0 ? -std::log(r[i]) : std::log(r[i]);
    CHECK(std::exp(lz) == doctest::Approx(gt::bf_partition(s)).epsilon(1e-10));
    const auto lzs = exact_level_log_partitions(sched);
    CHECK(lzs.back() == doctest::Approx(std::log(gt::bf_partition(s))).epsilon(1e-12));
  }
}

TEST_CASE("ratio estimate on identical models is exactly one") {
  const auto s = uniform_hardcore(share(gt::cycle_graph(6)), 0.7);
  CounterConfig cfg;
  Rng rng(7);
  const auto run = ratio_estimate(s, s, 0.2, cfg, rng);
  CHECK(run.estimate == 1.0);
  for (double x : empirical_second_moment(run, 2.0).ratio) CHECK(x == 1.0);
  CHECK(ratio_estimate(s, s, 0.9, cfg, rng).estimate == 1.0);
}

TEST_CASE("ratio estimate accuracy") {
  CounterConfig cfg;
  Rng rng(8);
  const auto one = make_graph(1, {});
  const double r1 = ratio_estimate(hardcore(one, {1.0}), hardcore(one, {1.01}), 0.01, cfg, rng).estimate;
  CHECK(std::abs(r1 / 1.005 - 1) <= 0.01);
  const auto p3 = share(gt::path_graph(3));
  const auto mu = uniform_hardcore(p3, 1.0), nu = uniform_hardcore(p3, 1.05);
  const double truth = std::exp(exact_partition(nu) - exact_partition(mu));
  const double r2 = ratio_estimate(mu, nu, 0.05, cfg, rng).estimate;
  CHECK(std::abs(r2 / truth - 1) <= 0.05);
}

TEST_CASE("second moment of the single-vertex level") {
  // W is 1 or 1.01 with probability 1/2 each
  const auto one = make_graph(1, {});
  const HardcoreModel mu(one, {1.0}), nu(one, {1.01});
  const auto models = ratio_schedule(mu, nu, 0.5);
  REQUIRE(models.size() == 2);
  const auto m2 = exact_level_second_moments(models);
  CHECK(m2[0] == doctest::Approx((0.5 + 0.5 * 1.01 * 1.01) / (1.005 * 1.005)).epsilon(1e-14));
  CHECK(m2[0] == doctest::Approx(1.0000248).epsilon(1e-7));
}

TEST_CASE("schedule keeps level second moments bounded for a distant pair") {
  Rng rng(9);
  const auto g = share(gt::random_graph(6, 0.5, 3, rng));
  const auto mu = gt::random_hardcore(g, 0.2, 1.0, rng);
  std::vector<double> lam = mu.lambda();
  for (double& l : lam) l += 0.5;
  const HardcoreModel nu(g, lam);
  CounterConfig cfg;
  const auto models = ratio_schedule(mu, nu, cfg.ratio_level_multiplier);
  for (double m : exact_level_second_moments(models)) CHECK(m <= cfg.second_moment_threshold);
  const auto run = ratio_estimate(SpinSystem(mu), SpinSystem(nu), 0.1, cfg, rng);
  CHECK_FALSE(empirical_second_moment(run, cfg.second_moment_threshold).any_flagged);
}

TEST_CASE("counter rejects hard Ising models") {
  const auto edge = make_graph(2, {{0, 1}});
  Rng rng(10);
  CHECK_THROWS_AS(approx_count(ising(edge, {0.1}, {ExtendedReal::pos_infinity(), 0.0}), 0.1,
                               annealing_only(), rng),
                  InvalidInput);
}
