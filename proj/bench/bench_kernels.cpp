// Serial vs OpenMP timings of the sampling kernels. Both paths produce
// identical numbers; the table shows wall time and the speedup.
//
// usage: bench_kernels [repeats] [threads]

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <omp.h>

#include "gibbstv/counter.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/parallel.hpp"
#include "gibbstv/testing.hpp"

using namespace gibbstv;

namespace {

double seconds(const std::function<double()>& fn, int repeats, double& value) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    value = fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

struct Kernel {
  std::string name;
  std::function<double(Execution)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  if (argc > 2) set_num_threads(std::atoi(argv[2]));

  Rng gen(2024);
  // n = 40 forces Glauber chains instead of the enumeration fallback
  const auto big = std::make_shared<const Graph>(testing::random_graph(40, 0.08, 3, gen));
  const SpinSystem hc_mu = testing::random_hardcore(big, 0.2, 0.8, gen);
  const SpinSystem is_mu = testing::random_ising(big, 0.1, 0.2, gen);
  const auto small = std::make_shared<const Graph>(testing::cycle_graph(8));
  const SpinSystem s_mu = testing::random_hardcore(small, 0.3, 0.9, gen);
  const SpinSystem s_nu = testing::perturb(std::get<HardcoreModel>(s_mu), 1e-3, gen);

  auto budget = [](Execution e) {
    EstimatorBudget b;
    b.exec = e;
    b.counter.exec = e;
    b.counter.exact_cap = 0;
    return b;
  };

  const std::vector<Kernel> kernels = {
      {"glauber draws (n=40, 5000)",
       [&](Execution e) {
         const Sampler s(hc_mu, {}, 0.01, SamplerConfig{});
         const auto xs = draw_values<double>(5000, 7, e, [&](Rng& r, std::size_t) {
           return static_cast<double>(s.draw(r)[0]);
         });
         double sum = 0;
         for (double x : xs) sum += x;
         return sum;
       }},
      {"approx_count hardcore (n=40)",
       [&](Execution e) {
         Rng r(8);
         auto b = budget(e);
         b.counter.boost_repeats = 1;
         return approx_count(hc_mu, 0.5, b.counter, r);
       }},
      {"approx_count ising (n=40)",
       [&](Execution e) {
         Rng r(9);
         auto b = budget(e);
         b.counter.boost_repeats = 1;
         return approx_count(is_mu, 0.5, b.counter, r);
       }},
      {"additive_tv (n=8, eps=0.02)",
       [&](Execution e) {
         Rng r(10);
         auto b = budget(e);
         b.counter.exact_cap = 20;
         return additive_tv(s_mu, s_nu, 0.02, b, r).estimate;
       }},
      {"advanced_relative_tv (n=8)",
       [&](Execution e) {
         Rng r(11);
         auto b = budget(e);
         b.kappa_override = 0.2;
         b.theta_override = 1e-3;
         b.c_T = 1;
         return advanced_relative_tv(s_mu, s_nu, 0.25, b, r).estimate;
       }},
  };

  std::cout << "threads " << omp_get_max_threads() << ", best of " << repeats << "\n";
  std::cout << std::left << std::setw(32) << "kernel" << std::right << std::setw(12) << "serial s"
            << std::setw(12) << "omp s" << std::setw(10) << "speedup" << std::setw(8) << "same"
            << "\n";
  bool all_same = true;
  for (const auto& k : kernels) {
    double a = 0, b = 0;
    const double ts = seconds([&] { return k.run(Execution::serial); }, repeats, a);
    const double tp = seconds([&] { return k.run(Execution::parallel); }, repeats, b);
    const bool same = a == b;
    all_same = all_same && same;
    std::cout << std::left << std::setw(32) << k.name << std::right << std::fixed
              << std::setprecision(4) << std::setw(12) << ts << std::setw(12) << tp
              << std::setprecision(2) << std::setw(10) << ts / tp << std::setw(8)
              << (same ? "yes" : "NO") << std::endl;
  }
  return all_same ? 0 : 1;
}
