#include <doctest.h>

#include <cmath>
#include <map>

#include "gibbstv/errors.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/sampler.hpp"
#include "helpers.hpp"

using namespace gibbstv;

namespace {

SamplerConfig glauber_only() {
  SamplerConfig c;
  c.exact_fallback_cap = 0;
  return c;
}

// Upper 1e-4 quantile of chi-square with df degrees (Wilson-Hilferty).
double chi2_critical(double df) {
  const double z = 3.719;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

}  // namespace

TEST_CASE("single free vertex is Bernoulli(1/2)") {
  const auto s = hardcore(make_graph(1, {}), {1.0});
  for (const SamplerConfig& cfg : {SamplerConfig{}, glauber_only()}) {
    const Sampler sm(s, {}, 0.01, cfg);
    Rng rng(1);
    int plus = 0;
    for (int i = 0; i < 100000; ++i) plus += sm.draw(rng)[0] == 1;
    CHECK(std::abs(plus / 1e5 - 0.5) <= 0.01);
  }
}

TEST_CASE("pinned occupied endpoint forces its neighbour out") {
  const auto s = uniform_hardcore(make_graph(2, {{0, 1}}), 1.0);
  for (const SamplerConfig& cfg : {SamplerConfig{}, glauber_only()}) {
    const Sampler sm(s, {1, 0}, 0.01, cfg);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
      const auto x = sm.draw(rng);
      CHECK(x[0] == 1);
      CHECK(x[1] == -1);
    }
  }
  CHECK_THROWS_AS(Sampler(s, {1, 1}, 0.01, SamplerConfig{}), InvalidInput);
}

TEST_CASE("P3 samples are close to uniform over its independent sets") {
  const auto s = uniform_hardcore(share(gt::path_graph(3)), 1.0);
  for (const SamplerConfig& cfg : {SamplerConfig{}, glauber_only()}) {
    const Sampler sm(s, {}, 0.01, cfg);
    Rng rng(3);
    std::map<std::uint64_t, int> hist;
    int middle = 0;
    const Vertex mid[] = {1};
    for (int i = 0; i < 100000; ++i) {
      ++hist[mask_from_config(sm.draw(rng))];
      middle += sm.draw_marginal(rng, mid)[0] == 1;
    }
    CHECK(hist.size() == 5);
    double tv = 0.0;
    for (auto [m, c] : hist) tv += std::abs(c / 1e5 - 0.2);
    CHECK(tv / 2 <= 0.02);
    CHECK(std::abs(middle / 1e5 - 0.2) <= 0.01);
    Rng r2(4);
    CHECK(sm.draw_marginal(r2, std::span<const Vertex>{}).empty());
  }
}

TEST_CASE("draw_marginal on all vertices follows draw") {
  const auto s = uniform_hardcore(share(gt::cycle_graph(5)), 0.8);
  const Sampler sm(s, {}, 0.01, SamplerConfig{});
  const Vertex all[] = {0, 1, 2, 3, 4};
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    const auto x = sm.draw(a);
    const auto y = sm.draw_marginal(b, all);
    CHECK(std::vector<std::int8_t>(x.begin(), x.end()) == y);
  }
}

TEST_CASE("detailed balance of the heat-bath update") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 4;
    const auto g = share(gt::random_graph(n, 0.6, 3, rng));
    const SpinSystem s = rep % 2 ? SpinSystem(gt::random_ising(g, 1, 1, rng))
                                 : SpinSystem(gt::random_hardcore(g, 0.2, 3, rng));
    std::vector<Vertex> free(n);
    for (Vertex v = 0; v < n; ++v) free[v] = v;
    const auto p = gt::bf_distribution(s);
    for (std::uint64_t a = 0; a < p.size(); ++a) {
      if (p[a] == 0.0) continue;
      for (Vertex v = 0; v < n; ++v) {
        const std::uint64_t b = a ^ (std::uint64_t{1} << v);
        if (p[b] == 0.0) continue;
        const auto x = config_from_mask(a, n), y = config_from_mask(b, n);
        const double lhs = p[a] * glauber_transition_probability(s, free, x, y);
        const double rhs = p[b] * glauber_transition_probability(s, free, y, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
      // rows sum to one
      double row = glauber_transition_probability(s, free, config_from_mask(a, n),
                                                  config_from_mask(a, n));
      for (Vertex v = 0; v < n; ++v)
        row += glauber_transition_probability(s, free, config_from_mask(a, n),
                                              config_from_mask(a ^ (std::uint64_t{1} << v), n));
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("one Glauber step preserves the Gibbs distribution (chi-square)") {
  const auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const std::vector<SpinSystem> models{
      hardcore(g, {0.5, 1.5, 1.0, 2.0}),
      ising(g, {0.4, -0.3, 0.2, 0.5}, {0.1, -0.2, 0.0, 0.3})};
  std::vector<Vertex> free{0, 1, 2, 3};
  for (const auto& s : models) {
    const Sampler exact(s, {}, 0.01, SamplerConfig{});
    REQUIRE(exact.uses_exact());
    const auto p = gt::bf_distribution(s);
    std::vector<double> count(p.size(), 0.0);
    Rng rng(6);
    const int N = 1000000;
    for (int i = 0; i < N; ++i) {
      auto x = exact.draw(rng);
      glauber_step(s, free, x, rng);
      count[mask_from_config(x)] += 1;
    }
    double chi2 = 0.0;
    int cells = 0;
    for (std::size_t m = 0; m < p.size(); ++m) {
      if (p[m] == 0.0) {
        CHECK(count[m] == 0.0);
        continue;
      }
      const double e = p[m] * N;
      chi2 += (count[m] - e) * (count[m] - e) / e;
      ++cells;
    }
    CHECK(chi2 <= chi2_critical(cells - 1));
  }
}

TEST_CASE("pinned vertices are never flipped") {
  Rng rng(7);
  const auto g = share(gt::random_graph(12, 0.4, 4, rng));
  const SpinSystem s = gt::random_ising(g, 1, 1, rng);
  Pinning pin(12, 0);
  pin[2] = 1;
  pin[7] = -1;
  const Sampler sm(s, pin, 0.01, glauber_only());
  CHECK_FALSE(sm.uses_exact());
  for (int i = 0; i < 200; ++i) {
    const auto x = sm.draw(rng);
    CHECK(x[2] == 1);
    CHECK(x[7] == -1);
  }
}

TEST_CASE("infinite fields are merged into the pinning") {
  const auto edge = make_graph(2, {{0, 1}});
  const auto s = ising(edge, {0.5}, {ExtendedReal::neg_infinity(), 0.0});
  const Sampler sm(s, {}, 0.01, glauber_only());
  CHECK(sm.effective_pin()[0] == -1);
  CHECK_THROWS_AS(Sampler(s, {1, 0}, 0.01, SamplerConfig{}), InvalidInput);
}

TEST_CASE("same seed gives the same sample sequence") {
  Rng g0(8);
  const auto g = share(gt::random_graph(25, 0.2, 4, g0));
  const SpinSystem s = gt::random_hardcore(g, 0.5, 1.5, g0);
  const Sampler sm(s, {}, 0.01, SamplerConfig{});
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) CHECK(sm.draw(a) == sm.draw(b));
}

TEST_CASE("step count") {
  CHECK(glauber_steps(0, 0.1, 20) == 0);
  CHECK(glauber_steps(10, 0.01, 20) ==
        static_cast<std::size_t>(std::ceil(20 * 10 * std::log(10 / 0.01))));
  CHECK(glauber_steps(1, 0.9, 1e-9) == 1);
}
