#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gibbstv/errors.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/log_math.hpp"
#include "helpers.hpp"

using namespace gibbstv;

TEST_CASE("partition function examples") {
  CHECK(std::exp(exact_partition(hardcore(make_graph(1, {}), {2.0}))) == doctest::Approx(3.0));
  CHECK(std::exp(exact_partition(uniform_hardcore(share(gt::path_graph(3)), 1.0))) ==
        doctest::Approx(5.0));
  CHECK(std::exp(exact_partition(ising(make_graph(1, {}), {}, {0.0}))) == doctest::Approx(2.0));
}

TEST_CASE("conditional partition examples") {
  const auto edge = make_graph(2, {{0, 1}});
  const auto s = uniform_hardcore(edge, 1.0);
  CHECK(exact_conditional_partition(s, {}) == doctest::Approx(exact_partition(s)));
  CHECK(std::exp(exact_conditional_partition(s, {1, 0})) == doctest::Approx(1.0));
  CHECK(exact_conditional_partition(s, {1, 1}) == kNegInf);
}

TEST_CASE("exact distribution agrees with brute force") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng() % 9;
    const auto g = share(gt::random_graph(n, 0.4, 4, rng));
    const SpinSystem s = rep % 2 ? SpinSystem(gt::random_ising(g, 1, 1, rng))
                                 : SpinSystem(gt::random_hardcore(g, 0.2, 2, rng));
    const auto d = exact_distribution(s);
    const auto p = gt::bf_distribution(s);
    double total = 0.0;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
      CHECK(std::exp(d.log_probs[i]) == doctest::Approx(p[d.support[i]]).epsilon(1e-12));
      total += p[d.support[i]];
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(std::exp(d.log_Z) == doctest::Approx(gt::bf_partition(s)).epsilon(1e-12));
  }
}

TEST_CASE("conditional partition agrees with brute force") {
  Rng rng(9);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = share(gt::random_graph(n, 0.4, 4, rng));
    const SpinSystem s = rep % 2 ? SpinSystem(gt::random_ising(g, 1, 1, rng))
                                 : SpinSystem(gt::random_hardcore(g, 0.2, 2, rng));
    Pinning pin(n, 0);
    for (auto& p : pin) p = static_cast<std::int8_t>(static_cast<int>(rng() % 3) - 1);
    const double z = gt::bf_conditional_partition(s, pin);
    const double lz = exact_conditional_partition(s, pin);
    if (z == 0.0)
      CHECK(lz == kNegInf);
    else
      CHECK(std::exp(lz) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("TV examples") {
  const auto one = make_graph(1, {});
  CHECK(exact_tv(hardcore(one, {1.0}), hardcore(one, {3.0})) == doctest::Approx(0.25));
  const auto p3 = share(gt::path_graph(3));
  CHECK(exact_tv(uniform_hardcore(p3, 0.7), uniform_hardcore(p3, 0.7)) == 0.0);
  const auto edge = make_graph(2, {{0, 1}});
  CHECK(exact_tv(ising(edge, {0.2}, {ExtendedReal::pos_infinity(), 0.0}),
                 ising(edge, {0.2}, {ExtendedReal::neg_infinity(), 0.0})) == doctest::Approx(1.0));
}

TEST_CASE("TV is symmetric, bounded and satisfies the triangle inequality") {
  Rng rng(4);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = share(gt::random_graph(n, 0.5, 4, rng));
    SpinSystem a = gt::random_ising(g, 1, 1, rng), b = gt::random_ising(g, 1, 1, rng),
               c = gt::random_ising(g, 1, 1, rng);
    if (rep % 2) {
      a = gt::random_hardcore(g, 0.1, 3, rng);
      b = gt::random_hardcore(g, 0.1, 3, rng);
      c = gt::random_hardcore(g, 0.1, 3, rng);
    }
    const double ab = exact_tv(a, b), ba = exact_tv(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(exact_tv(a, c) <= ab + exact_tv(b, c) + 1e-14);
    CHECK(ab == doctest::Approx(gt::bf_tv(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("marginal TV examples and monotonicity") {
  const auto edge = make_graph(2, {{0, 1}});
  const auto mu = hardcore(edge, {1.0, 1.0}), nu = hardcore(edge, {1.0, 2.0});
  const Vertex v0[] = {0}, all[] = {0, 1};
  // mu_0(+) = 1/3, nu_0(+) = 1/4
  CHECK(exact_marginal_tv(mu, nu, v0) == doctest::Approx(1.0 / 12));
  CHECK(exact_marginal_tv(mu, nu, all) == doctest::Approx(exact_tv(mu, nu)));
  CHECK(exact_marginal_tv(mu, nu, std::span<const Vertex>{}) == 0.0);

  Rng rng(8);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    const auto g = share(gt::random_graph(n, 0.5, 4, rng));
    const SpinSystem a = gt::random_hardcore(g, 0.1, 3, rng);
    const SpinSystem b = gt::random_hardcore(g, 0.1, 3, rng);
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    double prev = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<Vertex> s(order.begin(), order.begin() + static_cast<long>(k));
      const double m = exact_marginal_tv(a, b, s);
      CHECK(m >= prev - 1e-14);
      CHECK(m == doctest::Approx(gt::bf_marginal_tv(a, b, s)).epsilon(1e-12));
      prev = m;
    }
  }
}

TEST_CASE("W moments identity") {
  Rng rng(12);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = share(gt::random_graph(n, 0.5, 4, rng));
    SpinSystem a = gt::random_ising(g, 1, 1, rng);
    SpinSystem b = gt::perturb(std::get<IsingModel>(a), 0.1, 0.1, rng);
    const auto w = exact_w_moments(a, b);
    CHECK(std::exp(w.log_Z_mu - w.log_Z_nu) / 2 * w.mean_abs_dev ==
          doctest::Approx(gt::bf_tv(a, b)).epsilon(1e-10));
    CHECK(w.mean == doctest::Approx(gt::bf_partition(b) / gt::bf_partition(a)).epsilon(1e-10));
  }
}

TEST_CASE("independent set counts") {
  CHECK(count_independent_sets(Graph(1)) == 2);
  CHECK(count_independent_sets(gt::path_graph(3)) == 5);
  CHECK(count_independent_sets(gt::cycle_graph(3)) == 4);
}

TEST_CASE("low-degree occupation probability agrees with enumeration") {
  Rng rng(13);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rng() % 10;
    const Graph g = gt::random_graph(n, 0.5, 2, rng);
    const auto s = uniform_hardcore(share(g), 1.0);
    const auto p = gt::bf_distribution(s);
    for (Vertex v = 0; v < n; ++v) {
      double q = 0.0;
      for (std::uint64_t m = 0; m < p.size(); ++m)
        if ((m >> v) & 1) q += p[m];
      CHECK(static_cast<double>(occupation_probability_low_degree(g, v)) ==
            doctest::Approx(q).epsilon(1e-12));
    }
  }
  CHECK(static_cast<double>(occupation_probability_low_degree(gt::cycle_graph(5), 2)) ==
        doctest::Approx(3.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("counting through TV queries") {
  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const Graph g = gt::random_graph(n, 0.5, 3, rng);
    CountViaTvOptions with, without;
    without.low_degree_shortcut = false;
    CHECK(count_via_tv_queries(g, with).count == gt::bf_independent_sets(g));
    CHECK(count_via_tv_queries(g, without).count == gt::bf_independent_sets(g));
  }
  std::vector<std::pair<Vertex, Vertex>> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  CHECK_THROWS_AS(count_via_tv_queries(Graph::from_edges(5, star)), InvalidInput);
}

TEST_CASE("enumeration cap") {
  const auto big = uniform_hardcore(share(gt::path_graph(12)), 1.0);
  CHECK_THROWS_AS(exact_partition(big, 10), OracleError);
  CHECK_NOTHROW(exact_partition(big, 12));
}
