#include "gibbstv/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_map>

#include "gibbstv/errors.hpp"
#include "gibbstv/log_math.hpp"

namespace gibbstv {

namespace {

// Log-weight contribution of giving vertex v spin c, given spins of all
// lower-labelled vertices in sigma.
double local_term(const SpinSystem& s, const Configuration& sigma, Vertex v, int c) {
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    if (c != 1) return 0.0;
    if (hc->lambda(v) == 0.0) return kNegInf;
    for (Vertex u : hc->graph().neighbors(v)) {
      if (u >= v) break;
      if (sigma[u] == 1) return kNegInf;
    }
    return std::log(hc->lambda(v));
  }
  const auto& is = std::get<IsingModel>(s);
  const ExtendedReal& h = is.field(v);
  double t = 0.0;
  if (h.is_finite())
    t = h.value() * c;
  else if (h.infinite_sign() != c)
    return kNegInf;
  auto nb = is.graph().neighbors(v);
  for (std::size_t k = 0; k < nb.size() && nb[k] < v; ++k) t += is.coupling_at(v, k) * sigma[nb[k]] * c;
  return t;
}

template <std::size_t K, class Visit>
struct Walker {
  std::array<const SpinSystem*, K> models;
  const Pinning* pin;
  std::size_t n;
  Configuration sigma;
  Visit& visit;

  void run(Vertex v, std::uint64_t mask, std::array<double, K> lw) {
    if (v == n) {
      visit(mask, lw);
      return;
    }
    for (int c : {-1, 1}) {
      if (!pin->empty() && (*pin)[v] != 0 && (*pin)[v] != c) continue;
      std::array<double, K> next = lw;
      bool alive = false;
      for (std::size_t k = 0; k < K; ++k) {
        if (next[k] != kNegInf) next[k] += local_term(*models[k], sigma, v, c);
        alive = alive || next[k] != kNegInf;
      }
      if (!alive) continue;
      sigma[v] = static_cast<std::int8_t>(c);
      run(v + 1, c == 1 ? mask | (std::uint64_t{1} << v) : mask, next);
      sigma[v] = 0;
    }
  }
};

void check_cap(std::size_t n, const Pinning& pin, std::size_t cap) {
  if (!pin.empty() && pin.size() != n)
    throw InvalidInput("pinning length " + std::to_string(pin.size()) +
                       " does not match model size " + std::to_string(n));
  std::size_t free = n;
  if (!pin.empty()) free = static_cast<std::size_t>(std::count(pin.begin(), pin.end(), 0));
  if (free > cap || n > 63)
    throw OracleError("exact enumeration over " + std::to_string(free) +
                      " free vertices exceeds the cap " + std::to_string(cap));
}

}  // namespace

void enumerate_weights(const SpinSystem& s, const Pinning& pin, std::size_t cap,
                       const WeightVisitor& visit) {
  const std::size_t n = num_vertices(s);
  check_cap(n, pin, cap);
  auto fn = [&](std::uint64_t m, const std::array<double, 1>& lw) { visit(m, lw[0]); };
  Walker<1, decltype(fn)> w{{&s}, &pin, n, Configuration(n, 0), fn};
  w.run(0, 0, {0.0});
}

void enumerate_pair(const SpinSystem& mu, const SpinSystem& nu, const Pinning& pin,
                    std::size_t cap, const PairVisitor& visit) {
  require_same_pair(mu, nu);
  const std::size_t n = num_vertices(mu);
  check_cap(n, pin, cap);
  auto fn = [&](std::uint64_t m, const std::array<double, 2>& lw) { visit(m, lw[0], lw[1]); };
  Walker<2, decltype(fn)> w{{&mu, &nu}, &pin, n, Configuration(n, 0), fn};
  w.run(0, 0, {0.0, 0.0});
}

ExactDistribution exact_distribution(const SpinSystem& s, const Pinning& pin, std::size_t cap) {
  ExactDistribution d;
  d.n = num_vertices(s);
  LogSumExp z;
  enumerate_weights(s, pin, cap, [&](std::uint64_t m, double lw) {
    d.support.push_back(m);
    d.log_probs.push_back(lw);
    z.add(lw);
  });
  d.log_Z = z.value();
  for (double& lp : d.log_probs) lp -= d.log_Z;
  return d;
}

double exact_partition(const SpinSystem& s, std::size_t cap) {
  return exact_conditional_partition(s, {}, cap);
}

double exact_conditional_partition(const SpinSystem& s, const Pinning& pin, std::size_t cap) {
  LogSumExp z;
  enumerate_weights(s, pin, cap, [&](std::uint64_t, double lw) { z.add(lw); });
  return z.value();
}

namespace {

std::pair<double, double> pair_partitions(const SpinSystem& mu, const SpinSystem& nu,
                                          std::size_t cap) {
  LogSumExp zm, zn;
  enumerate_pair(mu, nu, {}, cap, [&](std::uint64_t, double a, double b) {
    zm.add(a);
    zn.add(b);
  });
  return {zm.value(), zn.value()};
}

}  // namespace

double exact_tv(const SpinSystem& mu, const SpinSystem& nu, std::size_t cap) {
  auto [zm, zn] = pair_partitions(mu, nu, cap);
  if (zm == kNegInf || zn == kNegInf) throw InvalidInput("model has zero partition function");
  CompensatedSum tv;
  enumerate_pair(mu, nu, {}, cap, [&](std::uint64_t, double a, double b) {
    tv.add(std::abs(std::exp(a - zm) - std::exp(b - zn)));
  });
  return std::clamp(0.5 * tv.value(), 0.0, 1.0);
}

double exact_marginal_tv(const SpinSystem& mu, const SpinSystem& nu,
                         std::span<const Vertex> subset, std::size_t cap) {
  if (subset.size() > cap)
    throw OracleError("marginal subset of size " + std::to_string(subset.size()) +
                      " exceeds the cap " + std::to_string(cap));
  if (subset.empty()) return 0.0;
  auto [zm, zn] = pair_partitions(mu, nu, cap);
  struct Acc {
    CompensatedSum pm, pn;
  };
  std::unordered_map<std::uint64_t, Acc> proj;
  enumerate_pair(mu, nu, {}, cap, [&](std::uint64_t m, double a, double b) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
      if ((m >> subset[i]) & 1) key |= std::uint64_t{1} << i;
    Acc& acc = proj[key];
    acc.pm.add(std::exp(a - zm));
    acc.pn.add(std::exp(b - zn));
  });
  std::vector<std::uint64_t> keys;
  for (const auto& kv : proj) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  CompensatedSum tv;
  for (auto k : keys) tv.add(std::abs(proj[k].pm.value() - proj[k].pn.value()));
  return std::clamp(0.5 * tv.value(), 0.0, 1.0);
}

WMoments exact_w_moments(const SpinSystem& mu, const SpinSystem& nu, std::size_t cap) {
  WMoments out;
  std::tie(out.log_Z_mu, out.log_Z_nu) = pair_partitions(mu, nu, cap);
  CompensatedSum mean;
  enumerate_pair(mu, nu, {}, cap, [&](std::uint64_t, double a, double b) {
    if (a != kNegInf && b != kNegInf) mean.add(std::exp(b - out.log_Z_mu));
  });
  out.mean = mean.value();
  CompensatedSum dev, var;
  enumerate_pair(mu, nu, {}, cap, [&](std::uint64_t, double a, double b) {
    if (a == kNegInf) return;
    const double p = std::exp(a - out.log_Z_mu);
    const double w = b == kNegInf ? 0.0 : std::exp(b - a);
    dev.add(p * std::abs(out.mean - w));
    var.add(p * (w - out.mean) * (w - out.mean));
  });
  out.mean_abs_dev = dev.value();
  out.variance = var.value();
  return out;
}

std::uint64_t count_independent_sets(const Graph& g) {
  std::vector<double> ones(g.num_vertices(), 1.0);
  SpinSystem s = HardcoreModel(std::make_shared<const Graph>(g), ones);
  std::uint64_t count = 0;
  enumerate_weights(s, {}, 63, [&](std::uint64_t, double) { ++count; });
  return count;
}

namespace {

// Independent sets of a path (or cycle when closed) visited in order; counts
// all of them, and those containing position `forced`.
std::pair<std::uint64_t, std::uint64_t> chain_counts(std::size_t len, bool closed,
                                                     std::size_t forced) {
  std::uint64_t total = 0, with = 0;
  for (int first = 0; first < 2; ++first) {
    // dp[last occupied][forced seen occupied]
    std::uint64_t dp[2][2] = {{0, 0}, {0, 0}};
    dp[first][forced == 0 && first] = 1;
    for (std::size_t i = 1; i < len; ++i) {
      std::uint64_t nx[2][2] = {{0, 0}, {0, 0}};
      for (int last = 0; last < 2; ++last)
        for (int f = 0; f < 2; ++f) {
          const std::uint64_t c = dp[last][f];
          if (!c) continue;
          nx[0][f] += c;
          if (!last) nx[1][f || i == forced] += c;
        }
      std::copy(&nx[0][0], &nx[0][0] + 4, &dp[0][0]);
    }
    for (int last = 0; last < 2; ++last)
      for (int f = 0; f < 2; ++f) {
        if (closed && first && last) continue;
        total += dp[last][f];
        if (f) with += dp[last][f];
      }
  }
  return {total, with};
}

}  // namespace

long double occupation_probability_low_degree(const Graph& g, Vertex v) {
  if (max_degree(g) > 2) throw InvalidInput("transfer matrix needs maximum degree <= 2");
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<Vertex> comp{v};
  seen[v] = 1;
  for (std::size_t i = 0; i < comp.size(); ++i)
    for (Vertex u : g.neighbors(comp[i]))
      if (!seen[u]) {
        seen[u] = 1;
        comp.push_back(u);
      }
  Vertex start = v;
  bool closed = true;
  for (Vertex u : comp)
    if (g.degree(u) < 2) {
      start = u;
      closed = false;
      break;
    }
  std::vector<Vertex> order{start};
  std::fill(seen.begin(), seen.end(), 0);
  seen[start] = 1;
  while (order.size() < comp.size()) {
    bool moved = false;
    for (Vertex u : g.neighbors(order.back()))
      if (!seen[u]) {
        seen[u] = 1;
        order.push_back(u);
        moved = true;
        break;
      }
    if (!moved) break;
  }
  const std::size_t pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), v) - order.begin());
  auto [total, with] = chain_counts(order.size(), closed, pos);
  return static_cast<long double>(with) / static_cast<long double>(total);
}

CountViaTvResult count_via_tv_queries(const Graph& g, const CountViaTvOptions& opt) {
  const std::size_t n = g.num_vertices();
  if (max_degree(g) > 3) throw InvalidInput("counting via TV queries needs maximum degree <= 3");
  if (n > opt.cap)
    throw OracleError("graph with " + std::to_string(n) + " vertices exceeds the cap " +
                      std::to_string(opt.cap));
  CountViaTvResult out;
  const double one_eps = 1.0 + opt.epsilon;
  const auto iterations = static_cast<std::size_t>(std::ceil(50.0 * n * one_eps * one_eps));
  // Rounding up onto a grid coarser than the double-precision oracle keeps
  // alpha >= q despite its rounding error; below q the update diverges.
  const int bits = static_cast<int>(std::min<std::size_t>(100 * n, 48));
  long double inv_prod = 1.0L;
  for (Vertex i = 0; i < n; ++i) {
    std::vector<Vertex> keep;
    for (Vertex j = i; j < n; ++j) keep.push_back(j);
    auto sub = induced_subgraph(g, keep);
    const std::size_t m = sub.graph.num_vertices();
    long double q;  // P(vertex i occupied) in G_i
    if (opt.low_degree_shortcut && max_degree(sub.graph) <= 2) {
      q = occupation_probability_low_degree(sub.graph, 0);
      ++out.shortcut_vertices;
    } else {
      auto gp = std::make_shared<const Graph>(sub.graph);
      SpinSystem mu = HardcoreModel(gp, std::vector<double>(m, 1.0));
      const Vertex target[] = {0};
      long double alpha = 0.5L;
      for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<double> lam(m, 0.0);
        lam[0] = static_cast<double>(alpha / (1.0L - alpha));
        SpinSystem nu = HardcoreModel(gp, std::move(lam));
        const double d = exact_marginal_tv(mu, nu, target, opt.cap);
        ++out.tv_queries;
        alpha -= static_cast<long double>(d) / one_eps;
        alpha = std::ldexp(std::ceil(std::ldexp(alpha, bits)), -bits);
      }
      q = alpha;
    }
    out.p_hat.push_back(1.0L - q);
    inv_prod /= (1.0L - q);
  }
  out.count = static_cast<std::uint64_t>(std::llround(inv_prod));
  return out;
}

}  // namespace gibbstv
