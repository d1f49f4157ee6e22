#include "gibbstv/regime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "gibbstv/errors.hpp"
#include "gibbstv/log_math.hpp"

namespace gibbstv {

const char* to_string(IsingCondition c) {
  switch (c) {
    case IsingCondition::spectral: return "spectral";
    case IsingCondition::ferromagnetic: return "ferromagnetic-consistent";
    case IsingCondition::antiferro_uniqueness: return "antiferro-uniqueness";
  }
  return "?";
}

double lambda_critical(std::size_t delta) {
  if (delta < 3) throw InvalidInput("lambda_c needs Delta >= 3");
  const double d = static_cast<double>(delta);
  return std::exp((d - 1) * std::log(d - 1) - d * std::log(d - 2));
}

std::optional<double> check_uniqueness(const HardcoreModel& m) {
  const std::size_t delta = max_degree(m.graph());
  if (delta <= 2) return 1.0;
  const double lc = lambda_critical(delta);
  double lmax = 0.0;
  for (double l : m.lambda()) lmax = std::max(lmax, l);
  if (lmax > lc) return std::nullopt;
  return 1.0 - lmax / lc;
}

bool uniqueness_for_lower_bound(const HardcoreModel& m) {
  const double lc = lambda_critical(std::max<std::size_t>(max_degree(m.graph()), 3));
  return std::all_of(m.lambda().begin(), m.lambda().end(),
                     [lc](double l) { return l <= lc; });
}

std::optional<IsingConditionReport> check_ising_condition(const IsingModel& m, double eta) {
  if (!m.is_soft()) throw InvalidInput("Ising condition check needs a soft model");
  const Graph& g = m.graph();
  const std::size_t n = g.num_vertices();
  if (n > 0) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    const auto edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      J(edges[e].first, edges[e].second) = m.edge_couplings()[e];
      J(edges[e].second, edges[e].first) = m.edge_couplings()[e];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    const double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    if (spread <= 1.0 - eta + kSpectralTolerance)
      return IsingConditionReport{IsingCondition::spectral, spread};
  } else {
    return IsingConditionReport{IsingCondition::spectral, 0.0};
  }
  double min_param = -kNegInf;
  bool ferro = true;
  for (double j : m.edge_couplings()) {
    ferro = ferro && j >= 0;
    min_param = std::min(min_param, j);
  }
  for (const auto& h : m.fields()) {
    ferro = ferro && h.value() >= 0;
    min_param = std::min(min_param, h.value());
  }
  if (ferro) return IsingConditionReport{IsingCondition::ferromagnetic, min_param};
  const auto& js = m.edge_couplings();
  if (!js.empty()) {
    const double beta = js.front();
    const bool uniform = std::all_of(js.begin(), js.end(), [beta](double j) { return j == beta; });
    if (uniform && beta <= 0) {
      const double d = static_cast<double>(max_degree(g));
      const double slack = std::exp(2 * beta) - (d - 2) / d;
      if (slack >= -1e-12) return IsingConditionReport{IsingCondition::antiferro_uniqueness, slack};
    }
  }
  return std::nullopt;
}

namespace {

MarginalBound hardcore_bound(const HardcoreModel& m, std::size_t cap) {
  const Graph& g = m.graph();
  MarginalBound out;
  double lmax = 0.0;
  for (double l : m.lambda()) lmax = std::max(lmax, l);
  out.b = 1.0 / (1.0 + lmax);
  if (lmax == 0.0) return out;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (m.lambda(v) == 0.0) continue;
    std::vector<Vertex> nb;
    for (Vertex u : g.neighbors(v))
      if (m.lambda(u) > 0) nb.push_back(u);
    if (nb.size() > cap)
      throw OracleError("vertex " + std::to_string(v) + " has free degree " +
                        std::to_string(nb.size()) + " above the enumeration cap " +
                        std::to_string(cap));
    const std::size_t k = nb.size();
    std::vector<std::uint32_t> conflict(k, 0);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t c = 0; c < k; ++c)
        if (g.has_edge(nb[a], nb[c])) conflict[a] |= 1u << c;
    std::vector<double> w(std::size_t{1} << k);
    CompensatedSum z;
    w[0] = 1.0;
    z.add(1.0);
    for (std::uint32_t s = 1; s < w.size(); ++s) {
      const int low = __builtin_ctz(s);
      const std::uint32_t rest = s & (s - 1);
      w[s] = (conflict[low] & rest) ? 0.0 : w[rest] * m.lambda(nb[low]);
      z.add(w[s]);
    }
    const double mv = m.lambda(v) / (m.lambda(v) + z.value());
    if (mv < out.b) {
      out.b = mv;
      out.witness_vertex = v;
      out.witness_spin = 1;
    }
  }
  return out;
}

MarginalBound ising_bound(const IsingModel& m) {
  MarginalBound out;
  const Graph& g = m.graph();
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    double abs_j = 0.0;
    for (std::size_t k = 0; k < g.degree(v); ++k) abs_j += std::abs(m.coupling_at(v, k));
    for (int c : {1, -1}) {
      const double val = logistic(2.0 * (m.field(v).value() * c - abs_j));
      if (val < out.b) {
        out.b = val;
        out.witness_vertex = v;
        out.witness_spin = c;
      }
    }
  }
  return out;
}

}  // namespace

MarginalBound marginal_lower_bound(const SpinSystem& s, std::size_t free_degree_cap) {
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) return hardcore_bound(*hc, free_degree_cap);
  const auto& is = std::get<IsingModel>(s);
  if (is.is_soft()) return ising_bound(is);
  Contraction c = contract(s, {});
  if (!c.feasible) throw InvalidInput("Ising model has no feasible configuration");
  MarginalBound mb = ising_bound(std::get<IsingModel>(*c.reduced));
  if (mb.witness_vertex >= 0) mb.witness_vertex = c.to_old[mb.witness_vertex];
  return mb;
}

RegimeReport regime_report(const SpinSystem& s, double eta) {
  RegimeReport r;
  if (const auto* hc = std::get_if<HardcoreModel>(&s)) {
    r.uniqueness_gap = check_uniqueness(*hc);
  } else {
    Contraction c = contract(s, {});
    if (c.feasible) r.ising_condition = check_ising_condition(std::get<IsingModel>(*c.reduced), eta);
  }
  r.marginal_bound = marginal_lower_bound(s).b;
  return r;
}

double parameter_distance(const SpinSystem& mu, const SpinSystem& nu) {
  require_same_pair(mu, nu);
  if (const auto* a = std::get_if<HardcoreModel>(&mu)) {
    const auto& b = std::get<HardcoreModel>(nu);
    double d = 0.0;
    for (std::size_t v = 0; v < a->num_vertices(); ++v)
      d = std::max(d, std::abs(a->lambda(v) - b.lambda(v)));
    return d;
  }
  const auto& a = std::get<IsingModel>(mu);
  const auto& b = std::get<IsingModel>(nu);
  if (!a.is_soft() || !b.is_soft())
    throw InvalidInput("parameter distance needs soft models; preprocess first");
  double d = 0.0;
  for (std::size_t e = 0; e < a.edge_couplings().size(); ++e)
    d = std::max(d, std::abs(a.edge_couplings()[e] - b.edge_couplings()[e]));
  const Graph& g = a.graph();
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    d = std::max(d, std::abs(a.field(v).value() - b.field(v).value()) /
                        static_cast<double>(g.degree(v) + 1));
  return d;
}

double tv_lower_bound_constant(ModelKind kind, const LowerBoundCase& c) {
  double best = 0.0;
  if (kind == ModelKind::hardcore) {
    if (c.hardcore_uniqueness) best = 1.0 / 5000.0;
    if (c.marginal_bound) best = std::max(best, std::pow(*c.marginal_bound, 3));
  } else if (c.marginal_bound) {
    best = *c.marginal_bound * *c.marginal_bound / 2.0;
  }
  if (best <= 0.0) throw GateError("no TV lower bound applies to this pair");
  return best;
}

PreprocessOutcome preprocess(const SpinSystem& mu, const SpinSystem& nu) {
  require_same_pair(mu, nu);
  PreprocessOutcome out;
  const std::size_t n = num_vertices(mu);
  const Pinning fm = forced_spins(mu);
  const Pinning fn = forced_spins(nu);
  if (kind_of(mu) == ModelKind::ising) {
    for (Vertex v = 0; v < n; ++v)
      if (fm[v] != 0 && fn[v] != 0 && fm[v] != fn[v]) {
        out.kind = PreprocessOutcome::Kind::resolved;
        out.tv = 1.0;
        return out;
      }
  }
  for (Vertex v = 0; v < n; ++v)
    if ((fm[v] == 0) != (fn[v] == 0)) {
      out.kind = PreprocessOutcome::Kind::big_gap;
      out.big_gap_b = std::min(marginal_lower_bound(mu).b, marginal_lower_bound(nu).b);
      return out;
    }
  Contraction cm = contract(mu, {});
  Contraction cn = contract(nu, {});
  if (!cm.feasible || !cn.feasible) throw InvalidInput("model has no feasible configuration");
  // Forced vertices coincide on both sides, so the relabelling is shared.
  out.mu = std::move(cm.reduced);
  out.nu = std::move(cn.reduced);
  out.to_old = std::move(cm.to_old);
  out.kind = PreprocessOutcome::Kind::soft;
  return out;
}

}  // namespace gibbstv
