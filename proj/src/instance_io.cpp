#include "gibbstv/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gibbstv/errors.hpp"

namespace gibbstv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string label_of(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InvalidInput(where + ": vertex labels must be strings or integers");
}

double number_of(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where + ": expected a number");
  return j.get<double>();
}

ExtendedReal field_of(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtendedReal::pos_infinity();
    if (s == "-inf") return ExtendedReal::neg_infinity();
    throw InvalidInput(where + ": unknown token \"" + s + "\" (use \"inf\" or \"-inf\")");
  }
  const double v = number_of(j, where);
  if (!std::isfinite(v)) throw InvalidInput(where + ": non-finite number");
  return v;
}

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

}  // namespace

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

Instance parse_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("document must be an object");
  const json& fmt = require(doc, "format");
  if (!fmt.is_number_integer() || fmt.get<int>() != 1)
    throw InvalidInput("format: only version 1 is supported");
  const json& model = require(doc, "model");
  if (!model.is_string()) throw InvalidInput("model: expected \"hardcore\" or \"ising\"");
  const std::string kind = model.get<std::string>();
  if (kind != "hardcore" && kind != "ising")
    throw InvalidInput("model: unknown kind \"" + kind + "\"");

  const json& verts = require(doc, "vertices");
  if (!verts.is_array()) throw InvalidInput("vertices: expected an array");
  std::vector<std::string> labels;
  std::map<std::string, Vertex> index;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const std::string l = label_of(verts[i], "vertices[" + std::to_string(i) + "]");
    if (!index.emplace(l, static_cast<Vertex>(labels.size())).second)
      throw InvalidInput("vertices[" + std::to_string(i) + "]: duplicate label \"" + l + "\"");
    labels.push_back(l);
  }
  auto lookup = [&](const json& j, const std::string& where) {
    const std::string l = label_of(j, where);
    auto it = index.find(l);
    if (it == index.end()) throw InvalidInput(where + ": unknown vertex \"" + l + "\"");
    return it->second;
  };

  std::vector<std::pair<Vertex, Vertex>> edges;
  if (doc.contains("edges")) {
    const json& es = doc.at("edges");
    if (!es.is_array()) throw InvalidInput("edges: expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!es[i].is_array() || es[i].size() != 2) throw InvalidInput(where + ": expected a pair");
      Vertex a = lookup(es[i][0], where), b = lookup(es[i][1], where);
      if (a == b) throw InvalidInput(where + ": self-loop");
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidInput("edges: duplicate edge");
  }
  auto graph = std::make_shared<const Graph>(Graph::from_edges(labels.size(), edges));

  if (kind == "hardcore") {
    for (const char* bad : {"J", "h"})
      if (doc.contains(bad)) throw InvalidInput(std::string(bad) + ": not a hardcore field");
    const json& lam = require(doc, "lambda");
    if (!lam.is_object()) throw InvalidInput("lambda: expected an object keyed by vertex");
    std::vector<double> lambda(labels.size());
    std::vector<char> seen(labels.size(), 0);
    for (auto it = lam.begin(); it != lam.end(); ++it) {
      const std::string where = "lambda." + it.key();
      auto f = index.find(it.key());
      if (f == index.end()) throw InvalidInput(where + ": unknown vertex");
      const double v = number_of(it.value(), where);
      if (!std::isfinite(v) || v < 0) throw InvalidInput(where + ": must be finite and >= 0");
      lambda[f->second] = v;
      seen[f->second] = 1;
    }
    for (std::size_t v = 0; v < labels.size(); ++v)
      if (!seen[v]) throw InvalidInput("lambda." + labels[v] + ": missing");
    return {HardcoreModel(graph, std::move(lambda)), std::move(labels)};
  }

  if (doc.contains("lambda")) throw InvalidInput("lambda: not an Ising field");
  const auto gedges = graph->edges();
  std::vector<double> J(gedges.size(), 0.0);
  std::vector<char> jseen(gedges.size(), 0);
  if (doc.contains("J")) {
    const json& js = doc.at("J");
    if (!js.is_array()) throw InvalidInput("J: expected an array of [u, v, value]");
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string where = "J[" + std::to_string(i) + "]";
      if (!js[i].is_array() || js[i].size() != 3) throw InvalidInput(where + ": expected [u, v, value]");
      Vertex a = lookup(js[i][0], where), b = lookup(js[i][1], where);
      const double val = number_of(js[i][2], where);
      if (!std::isfinite(val)) throw InvalidInput(where + ": coupling must be finite");
      const std::pair<Vertex, Vertex> e{std::min(a, b), std::max(a, b)};
      auto pos = std::lower_bound(gedges.begin(), gedges.end(), e);
      if (pos == gedges.end() || *pos != e) throw InvalidInput(where + ": coupling on a non-edge");
      const auto k = static_cast<std::size_t>(pos - gedges.begin());
      if (jseen[k] && J[k] != val) throw InvalidInput(where + ": asymmetric J");
      J[k] = val;
      jseen[k] = 1;
    }
  }
  std::vector<ExtendedReal> h(labels.size(), 0.0);
  if (doc.contains("h")) {
    const json& hs = doc.at("h");
    if (!hs.is_object()) throw InvalidInput("h: expected an object keyed by vertex");
    for (auto it = hs.begin(); it != hs.end(); ++it) {
      auto f = index.find(it.key());
      if (f == index.end()) throw InvalidInput("h." + it.key() + ": unknown vertex");
      h[f->second] = field_of(it.value(), "h." + it.key());
    }
  }
  return {IsingModel(graph, std::move(J), std::move(h)), std::move(labels)};
}

Instance parse_instance(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str());
}

Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  try {
    return parse_instance(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string emit_instance(const Instance& inst) {
  const Graph& g = graph_of(inst.model);
  const auto& L = inst.labels;
  ordered_json doc;
  doc["format"] = 1;
  doc["model"] = kind_of(inst.model) == ModelKind::hardcore ? "hardcore" : "ising";
  doc["vertices"] = L;
  ordered_json edges = ordered_json::array();
  const auto es = g.edges();
  for (auto [u, v] : es) edges.push_back({L[u], L[v]});
  doc["edges"] = edges;
  if (const auto* hc = std::get_if<HardcoreModel>(&inst.model)) {
    ordered_json lam = ordered_json::object();
    for (Vertex v = 0; v < L.size(); ++v) lam[L[v]] = hc->lambda(v);
    doc["lambda"] = lam;
  } else {
    const auto& is = std::get<IsingModel>(inst.model);
    ordered_json J = ordered_json::array();
    for (std::size_t e = 0; e < es.size(); ++e)
      J.push_back({L[es[e].first], L[es[e].second], is.edge_couplings()[e]});
    doc["J"] = J;
    ordered_json h = ordered_json::object();
    for (Vertex v = 0; v < L.size(); ++v) {
      const auto& f = is.field(v);
      if (f.is_finite())
        h[L[v]] = f.value();
      else
        h[L[v]] = f.infinite_sign() > 0 ? "inf" : "-inf";
    }
    doc["h"] = h;
  }
  return doc.dump(2) + "\n";
}

std::uint64_t instance_hash(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_instance(inst)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vertex resolve_vertex(const Instance& inst, const std::string& label) {
  auto it = std::find(inst.labels.begin(), inst.labels.end(), label);
  if (it != inst.labels.end()) return static_cast<Vertex>(it - inst.labels.begin());
  throw InvalidInput("unknown vertex \"" + label + "\"");
}

namespace {

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

}  // namespace

std::string run_record_json(const RunRecord& rec, const EstimatorBudget& budget) {
  const EstimateReport& r = rec.report;
  ordered_json j;
  j["version"] = kVersion;
  j["command"] = rec.command;
  ordered_json rep;
  rep["estimate"] = r.estimate;
  rep["error_kind"] = r.error_kind == ErrorKind::additive ? "additive" : "relative";
  rep["branch"] = r.branch;
  rep["d_par"] = r.d_par;
  rep["theta"] = r.theta;
  rep["b"] = r.b;
  rep["C_tv_par"] = r.C_tv_par;
  rep["K"] = r.K;
  rep["L"] = r.L;
  rep["inner_epsilon"] = r.inner_epsilon;
  rep["samples_used"] = r.samples_used;
  rep["counter_calls"] = r.counter_calls;
  rep["repeats"] = r.repeats;
  if (rec.include_timing) rep["elapsed_seconds"] = r.elapsed_seconds;
  rep["warnings"] = r.warnings;
  j["report"] = rep;
  ordered_json in;
  in["mu"] = hex(rec.mu_hash);
  in["nu"] = hex(rec.nu_hash);
  j["inputs"] = in;
  ordered_json cfg;
  cfg["epsilon"] = rec.epsilon;
  cfg["mode"] = rec.mode;
  cfg["t"] = budget.t;
  cfg["kappa"] = budget.kappa_override ? ordered_json(*budget.kappa_override) : ordered_json(nullptr);
  cfg["theta"] = budget.theta_override ? ordered_json(*budget.theta_override) : ordered_json(nullptr);
  cfg["c_T"] = budget.c_T;
  cfg["c_mix"] = budget.sampler.mixing_multiplier;
  cfg["exact_fallback_cap"] = budget.sampler.exact_fallback_cap;
  cfg["c_levels"] = budget.counter.levels_multiplier;
  cfg["samples_per_level"] = budget.counter.samples_per_level;
  cfg["boost_repeats"] = budget.counter.boost_repeats;
  cfg["counter_exact_cap"] = budget.counter.exact_cap;
  cfg["paper_strict"] = budget.paper_strict;
  cfg["exact"] = budget.exact;
  cfg["failure_prob"] = budget.failure_prob;
  j["config"] = cfg;
  j["seed"] = rec.seed;
  return j.dump(2) + "\n";
}

std::string report_text(const EstimateReport& r, bool timing) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "estimate      " << r.estimate << " ("
     << (r.error_kind == ErrorKind::additive ? "additive" : "relative") << ")\n"
     << "branch        " << r.branch << "\n"
     << "d_par         " << r.d_par << "\n"
     << "theta         " << r.theta << "\n"
     << "b             " << r.b << "\n"
     << "C_tv_par      " << r.C_tv_par << "\n";
  if (r.K > 0) os << "K, L          " << r.K << ", " << r.L << "\n";
  os << "samples       " << r.samples_used << "\n"
     << "counter calls " << r.counter_calls << "\n"
     << "repeats       " << r.repeats << "\n";
  if (timing) os << "elapsed       " << r.elapsed_seconds << " s\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace gibbstv
