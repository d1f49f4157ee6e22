#include "gibbstv/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gibbstv::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Graph random_graph(std::size_t n, double p, std::size_t max_deg, Rng& rng) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<std::size_t> deg(n, 0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [u, v] : pairs) {
    if (deg[u] >= max_deg || deg[v] >= max_deg || uniform(rng, 0, 1) >= p) continue;
    ++deg[u];
    ++deg[v];
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return Graph::from_edges(n, e);
}

Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  if (n >= 3) e.emplace_back(0, static_cast<Vertex>(n - 1));
  return Graph::from_edges(n, e);
}

HardcoreModel random_hardcore(const GraphPtr& g, double lo, double hi, Rng& rng) {
  std::vector<double> lam(g->num_vertices());
  for (double& l : lam) l = uniform(rng, lo, hi);
  return HardcoreModel(g, std::move(lam));
}

IsingModel random_ising(const GraphPtr& g, double j_scale, double h_scale, Rng& rng) {
  std::vector<double> j(g->num_edges());
  for (double& x : j) x = uniform(rng, -j_scale, j_scale);
  std::vector<ExtendedReal> h;
  for (std::size_t v = 0; v < g->num_vertices(); ++v) h.emplace_back(uniform(rng, -h_scale, h_scale));
  return IsingModel(g, std::move(j), std::move(h));
}

HardcoreModel perturb(const HardcoreModel& m, double by, Rng& rng, double floor) {
  std::vector<double> lam = m.lambda();
  for (double& l : lam) l = std::max(floor, l + uniform(rng, -by, by));
  return HardcoreModel(m.graph_ptr(), std::move(lam));
}

IsingModel perturb(const IsingModel& m, double by_j, double by_h, Rng& rng) {
  std::vector<double> j = m.edge_couplings();
  for (double& x : j) x += uniform(rng, -by_j, by_j);
  std::vector<ExtendedReal> h;
  for (const auto& f : m.fields()) h.emplace_back(f.value() + uniform(rng, -by_h, by_h));
  return IsingModel(m.graph_ptr(), std::move(j), std::move(h));
}

double bf_weight(const SpinSystem& s, std::uint64_t mask) {
  const Graph& g = graph_of(s);
  auto spin = [mask](Vertex v) { return (mask >> v) & 1 ? 1.0 : -1.0; };
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    for (auto [u, v] : g.edges())
      if (spin(u) > 0 && spin(v) > 0) return 0.0;
    double w = 1.0;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      if (spin(v) > 0) w *= hc->lambda(v);
    return w;
  }
  const auto& is = std::get<IsingModel>(s);
  double H = 0.0;
  const auto es = g.edges();
  for (std::size_t e = 0; e < es.size(); ++e)
    H += is.edge_couplings()[e] * spin(es[e].first) * spin(es[e].second);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const auto& h = is.field(v);
    if (h.is_finite())
      H += h.value() * spin(v);
    else if (h.infinite_sign() != static_cast<int>(spin(v)))
      return 0.0;
  }
  return std::exp(H);
}

std::vector<double> bf_distribution(const SpinSystem& s) {
  const std::size_t n = num_vertices(s);
  std::vector<double> p(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < p.size(); ++m) p[m] = bf_weight(s, m);
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= z;
  return p;
}

double bf_partition(const SpinSystem& s) { return bf_conditional_partition(s, {}); }

double bf_conditional_partition(const SpinSystem& s, const Pinning& pin) {
  const std::size_t n = num_vertices(s);
  double z = 0.0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    bool ok = true;
    for (Vertex v = 0; v < pin.size() && ok; ++v)
      if (pin[v] != 0 && (((m >> v) & 1) ? 1 : -1) != pin[v]) ok = false;
    if (ok) z += bf_weight(s, m);
  }
  return z;
}

double bf_tv(const SpinSystem& mu, const SpinSystem& nu) {
  const auto p = bf_distribution(mu), q = bf_distribution(nu);
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += std::abs(p[i] - q[i]);
  return t / 2;
}

double bf_marginal_tv(const SpinSystem& mu, const SpinSystem& nu, const std::vector<Vertex>& subset) {
  const auto p = bf_distribution(mu), q = bf_distribution(nu);
  std::vector<double> pp(std::size_t{1} << subset.size(), 0.0), qq(pp.size(), 0.0);
  for (std::uint64_t m = 0; m < p.size(); ++m) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
      if ((m >> subset[i]) & 1) k |= std::uint64_t{1} << i;
    pp[k] += p[m];
    qq[k] += q[m];
  }
  double t = 0.0;
  for (std::size_t i = 0; i < pp.size(); ++i) t += std::abs(pp[i] - qq[i]);
  return t / 2;
}

double bf_marginal_bound(const SpinSystem& s) {
  const std::size_t n = num_vertices(s);
  double best = 1.0;
  std::vector<double> w(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < w.size(); ++m) w[m] = bf_weight(s, m);
  // Pinning of V \ {v}: ternary code per vertex (0 free, 1 minus, 2 plus).
  std::size_t codes = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) codes *= 3;
  for (Vertex v = 0; v < n; ++v) {
    for (std::size_t code = 0; code < codes; ++code) {
      std::vector<int> pin(n, 0);
      std::size_t c = code;
      for (Vertex u = 0; u < n; ++u) {
        if (u == v) continue;
        pin[u] = static_cast<int>(c % 3);
        c /= 3;
      }
      double zp = 0.0, zm = 0.0;
      for (std::uint64_t m = 0; m < w.size(); ++m) {
        if (w[m] == 0.0) continue;
        bool ok = true;
        for (Vertex u = 0; u < n && ok; ++u) {
          if (pin[u] == 0 || u == v) continue;
          const bool plus = (m >> u) & 1;
          ok = (pin[u] == 2) == plus;
        }
        if (!ok) continue;
        ((m >> v) & 1 ? zp : zm) += w[m];
      }
      const double z = zp + zm;
      if (z <= 0.0) continue;
      for (double part : {zp, zm})
        if (part > 0.0) best = std::min(best, part / z);
    }
  }
  return best;
}

std::uint64_t bf_independent_sets(const Graph& g) {
  const std::size_t n = g.num_vertices();
  const auto es = g.edges();
  std::uint64_t count = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    bool ok = true;
    for (auto [u, v] : es)
      if (((m >> u) & 1) && ((m >> v) & 1)) ok = false;
    count += ok;
  }
  return count;
}

}  // namespace gibbstv::testing
