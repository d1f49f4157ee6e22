#include <doctest.h>

#include <omp.h>

#include "gibbstv/counter.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/parallel.hpp"
#include "helpers.hpp"

using namespace gibbstv;

namespace {

EstimatorBudget with(Execution e) {
  EstimatorBudget b;
  b.exec = e;
  b.counter.exec = e;
  return b;
}

struct ThreadScope {
  int saved = omp_get_max_threads();
  explicit ThreadScope(int n) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("draw_values matches a serial loop over blocks") {
  ThreadScope scope(4);
  auto fn = [](Rng& r, std::size_t i) { return r() ^ i; };
  for (std::size_t count : {0, 1, 63, 64, 65, 1000}) {
    const auto s = draw_values<std::uint64_t>(count, 99, Execution::serial, fn);
    const auto p = draw_values<std::uint64_t>(count, 99, Execution::parallel, fn);
    CHECK(s == p);
    std::vector<std::uint64_t> ref(count);
    for (std::size_t b = 0; b * kDrawBlock < count; ++b) {
      Rng r = stream_rng(99, b);
      for (std::size_t i = b * kDrawBlock; i < std::min(count, (b + 1) * kDrawBlock); ++i) ref[i] = r() ^ i;
    }
    CHECK(s == ref);
  }
  CHECK(draw_values<std::uint64_t>(10, 1, Execution::serial, fn) !=
        draw_values<std::uint64_t>(10, 2, Execution::serial, fn));
}

TEST_CASE("map_indices propagates exceptions") {
  ThreadScope scope(4);
  auto bad = [](std::size_t i) -> int {
    if (i == 17) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_AS(map_indices<int>(100, Execution::parallel, bad), std::runtime_error);
  const auto v = map_indices<int>(100, Execution::parallel, [](std::size_t i) { return static_cast<int>(i * i); });
  CHECK(v[9] == 81);
}

TEST_CASE("serial and parallel estimators agree bit for bit") {
  ThreadScope scope(4);
  const auto g = share(gt::cycle_graph(6));
  const auto mu = uniform_hardcore(g, 0.8), nu = hardcore(g, {0.8, 0.9, 0.8, 0.8, 0.7, 0.8});
  for (auto run : {0, 1, 2, 3}) {
    Rng a(5), b(5);
    double x = 0, y = 0;
    switch (run) {
      case 0:
        x = additive_tv(mu, nu, 0.1, with(Execution::serial), a).estimate;
        y = additive_tv(mu, nu, 0.1, with(Execution::parallel), b).estimate;
        break;
      case 1: {
        auto cs = with(Execution::serial).counter, cp = with(Execution::parallel).counter;
        cs.exact_cap = cp.exact_cap = 0;
        x = approx_count(mu, 0.2, cs, a);
        y = approx_count(mu, 0.2, cp, b);
        break;
      }
      case 2: {
        const Vertex sub[] = {0, 2};
        x = marginal_additive_tv(mu, nu, sub, 0.2, with(Execution::serial), a).estimate;
        y = marginal_additive_tv(mu, nu, sub, 0.2, with(Execution::parallel), b).estimate;
        break;
      }
      case 3: {
        auto bs = with(Execution::serial), bp = with(Execution::parallel);
        bs.kappa_override = bp.kappa_override = 0.85;
        bs.theta_override = bp.theta_override = 0.2;
        bs.c_T = bp.c_T = 0.2;
        x = advanced_relative_tv(mu, nu, 0.25, bs, a).estimate;
        y = advanced_relative_tv(mu, nu, 0.25, bp, b).estimate;
        break;
      }
    }
    CAPTURE(run);
    CHECK(x == y);
  }
}

TEST_CASE("thread count does not change results") {
  const auto g = share(gt::path_graph(7));
  const auto mu = uniform_hardcore(g, 1.0), nu = uniform_hardcore(g, 1.2);
  double first = -1;
  for (int threads : {1, 2, 3, 8}) {
    ThreadScope scope(threads);
    Rng r(77);
    const double e = additive_tv(mu, nu, 0.1, with(Execution::parallel), r).estimate;
    if (first < 0) first = e;
    CHECK(e == first);
  }
}
