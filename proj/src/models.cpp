#include "gibbstv/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/log_math.hpp"

namespace gibbstv {

std::string ExtendedReal::to_string() const {
  if (kind_ == Kind::pos_inf) return "inf";
  if (kind_ == Kind::neg_inf) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

HardcoreModel::HardcoreModel(GraphPtr graph, std::vector<double> lambda)
    : graph_(std::move(graph)), lambda_(std::move(lambda)) {
  if (!graph_) throw InvalidInput("hardcore model without graph");
  if (lambda_.size() != graph_->num_vertices())
    throw InvalidInput("lambda has " + std::to_string(lambda_.size()) +
                       " entries for " + std::to_string(graph_->num_vertices()) +
                       " vertices");
  for (std::size_t v = 0; v < lambda_.size(); ++v)
    if (!std::isfinite(lambda_[v]) || lambda_[v] < 0)
      throw InvalidInput("lambda[" + std::to_string(v) + "] must be finite and >= 0");
}

bool HardcoreModel::is_soft() const {
  return std::all_of(lambda_.begin(), lambda_.end(), [](double l) { return l > 0; });
}

IsingModel::IsingModel(GraphPtr graph, std::vector<double> edge_couplings,
                       std::vector<ExtendedReal> fields)
    : graph_(std::move(graph)), edge_j_(std::move(edge_couplings)), fields_(std::move(fields)) {
  if (!graph_) throw InvalidInput("Ising model without graph");
  const Graph& g = *graph_;
  if (fields_.size() != g.num_vertices())
    throw InvalidInput("h has " + std::to_string(fields_.size()) + " entries for " +
                       std::to_string(g.num_vertices()) + " vertices");
  if (edge_j_.size() != g.num_edges())
    throw InvalidInput("J has " + std::to_string(edge_j_.size()) + " entries for " +
                       std::to_string(g.num_edges()) + " edges");
  for (std::size_t e = 0; e < edge_j_.size(); ++e)
    if (!std::isfinite(edge_j_[e]))
      throw InvalidInput("J on edge " + std::to_string(e) + " must be finite");
  adj_j_.resize(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) adj_j_[v].assign(g.degree(v), 0.0);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    auto nu = g.neighbors(u);
    auto nv = g.neighbors(v);
    adj_j_[u][std::lower_bound(nu.begin(), nu.end(), v) - nu.begin()] = edge_j_[e];
    adj_j_[v][std::lower_bound(nv.begin(), nv.end(), u) - nv.begin()] = edge_j_[e];
  }
}

double IsingModel::coupling(Vertex u, Vertex v) const {
  auto nu = graph_->neighbors(u);
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it == nu.end() || *it != v) return 0.0;
  return adj_j_[u][it - nu.begin()];
}

bool IsingModel::is_soft() const {
  return std::all_of(fields_.begin(), fields_.end(),
                     [](const ExtendedReal& h) { return h.is_finite(); });
}

ModelKind kind_of(const SpinSystem& s) {
  return std::holds_alternative<HardcoreModel>(s) ? ModelKind::hardcore : ModelKind::ising;
}

const Graph& graph_of(const SpinSystem& s) {
  return std::visit([](const auto& m) -> const Graph& { return m.graph(); }, s);
}

const GraphPtr& graph_ptr_of(const SpinSystem& s) {
  return std::visit([](const auto& m) -> const GraphPtr& { return m.graph_ptr(); }, s);
}

std::size_t num_vertices(const SpinSystem& s) {
  return std::visit([](const auto& m) { return m.num_vertices(); }, s);
}

bool is_soft(const SpinSystem& s) {
  return std::visit([](const auto& m) { return m.is_soft(); }, s);
}

double log_weight(const SpinSystem& s, std::span<const std::int8_t> sigma) {
  if (sigma.size() != num_vertices(s))
    throw InvalidInput("configuration length " + std::to_string(sigma.size()) +
                       " does not match model size " + std::to_string(num_vertices(s)));
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    const Graph& g = hc->graph();
    double lw = 0.0;
    for (Vertex v = 0; v < sigma.size(); ++v) {
      if (sigma[v] != 1) continue;
      if (hc->lambda(v) == 0.0) return kNegInf;
      for (Vertex u : g.neighbors(v))
        if (sigma[u] == 1) return kNegInf;
      lw += std::log(hc->lambda(v));
    }
    return lw;
  }
  const auto& is = std::get<IsingModel>(s);
  const Graph& g = is.graph();
  double h = 0.0;
  for (Vertex v = 0; v < sigma.size(); ++v) {
    const ExtendedReal& f = is.field(v);
    if (f.is_finite())
      h += f.value() * sigma[v];
    else if (f.infinite_sign() != sigma[v])
      return kNegInf;
    auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (v < nb[k]) h += is.coupling_at(v, k) * sigma[v] * sigma[nb[k]];
  }
  return h;
}

double log_odds_plus(const SpinSystem& s, std::span<const std::int8_t> sigma, Vertex v) {
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    if (hc->lambda(v) == 0.0) return kNegInf;
    for (Vertex u : hc->graph().neighbors(v))
      if (sigma[u] == 1) return kNegInf;
    return std::log(hc->lambda(v));
  }
  const auto& is = std::get<IsingModel>(s);
  const ExtendedReal& f = is.field(v);
  if (!f.is_finite()) return f.infinite_sign() > 0 ? -kNegInf : kNegInf;
  double local = f.value();
  auto nb = is.graph().neighbors(v);
  for (std::size_t k = 0; k < nb.size(); ++k) local += is.coupling_at(v, k) * sigma[nb[k]];
  return 2.0 * local;
}

Pinning forced_spins(const SpinSystem& s) {
  Pinning p(num_vertices(s), 0);
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    for (Vertex v = 0; v < p.size(); ++v)
      if (hc->lambda(v) == 0.0) p[v] = -1;
  } else {
    const auto& is = std::get<IsingModel>(s);
    for (Vertex v = 0; v < p.size(); ++v)
      p[v] = static_cast<std::int8_t>(is.field(v).infinite_sign());
  }
  return p;
}

void require_same_pair(const SpinSystem& mu, const SpinSystem& nu) {
  if (kind_of(mu) != kind_of(nu)) throw InvalidInput("model kinds differ");
  const Graph& a = graph_of(mu);
  const Graph& b = graph_of(nu);
  if (&a == &b) return;
  if (a.num_vertices() != b.num_vertices() || a.edges() != b.edges())
    throw InvalidInput("models live on different graphs");
}

namespace {

Contraction infeasible(std::size_t n) {
  Contraction c;
  c.feasible = false;
  c.log_offset = kNegInf;
  c.applied.assign(n, 0);
  return c;
}

}  // namespace

Contraction contract(const SpinSystem& s, const Pinning& pin_in) {
  const std::size_t n = num_vertices(s);
  Pinning pin = pin_in.empty() ? Pinning(n, 0) : pin_in;
  if (pin.size() != n)
    throw InvalidInput("pinning length " + std::to_string(pin.size()) +
                       " does not match model size " + std::to_string(n));
  const Pinning forced = forced_spins(s);
  for (Vertex v = 0; v < n; ++v) {
    if (forced[v] == 0) continue;
    if (pin[v] != 0 && pin[v] != forced[v]) return infeasible(n);
    pin[v] = forced[v];
  }
  const Graph& g = graph_of(s);
  Contraction out;
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    for (Vertex v = 0; v < n; ++v) {
      if (pin[v] != 1) continue;
      out.log_offset += std::log(hc->lambda(v));
      for (Vertex u : g.neighbors(v)) {
        if (pin[u] == 1) return infeasible(n);
        pin[u] = -1;
      }
    }
    std::vector<Vertex> keep;
    for (Vertex v = 0; v < n; ++v)
      if (pin[v] == 0) keep.push_back(v);
    auto sub = induced_subgraph(g, keep);
    std::vector<double> lam;
    for (Vertex v : sub.to_old) lam.push_back(hc->lambda(v));
    out.reduced = HardcoreModel(std::make_shared<const Graph>(std::move(sub.graph)),
                                std::move(lam));
    out.to_old = std::move(sub.to_old);
    out.applied = std::move(pin);
    return out;
  }
  const auto& is = std::get<IsingModel>(s);
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < n; ++v)
    if (pin[v] == 0) keep.push_back(v);
  auto sub = induced_subgraph(g, keep);
  std::vector<ExtendedReal> h;
  for (Vertex v : sub.to_old) {
    double f = is.field(v).value();
    auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (pin[nb[k]] != 0) f += is.coupling_at(v, k) * pin[nb[k]];
    h.emplace_back(f);
  }
  for (Vertex v = 0; v < n; ++v) {
    if (pin[v] == 0) continue;
    if (is.field(v).is_finite()) out.log_offset += is.field(v).value() * pin[v];
    auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (v < nb[k] && pin[nb[k]] != 0) out.log_offset += is.coupling_at(v, k) * pin[v] * pin[nb[k]];
  }
  std::vector<double> j;
  for (auto [a, b] : sub.graph.edges()) j.push_back(is.coupling(sub.to_old[a], sub.to_old[b]));
  out.reduced = IsingModel(std::make_shared<const Graph>(std::move(sub.graph)), std::move(j),
                           std::move(h));
  out.to_old = std::move(sub.to_old);
  out.applied = std::move(pin);
  return out;
}

Configuration config_from_mask(std::uint64_t mask, std::size_t n) {
  Configuration c(n);
  for (std::size_t v = 0; v < n; ++v) c[v] = (mask >> v) & 1 ? 1 : -1;
  return c;
}

std::uint64_t mask_from_config(std::span<const std::int8_t> sigma) {
  std::uint64_t m = 0;
  for (std::size_t v = 0; v < sigma.size(); ++v)
    if (sigma[v] == 1) m |= std::uint64_t{1} << v;
  return m;
}

}  // namespace gibbstv
