// Command-line driver: TV estimates, counting, sampling, regime checks and
// the acceptance suites.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbstv/counter.hpp"
#include "gibbstv/errors.hpp"
#include "gibbstv/estimators.hpp"
#include "gibbstv/exact.hpp"
#include "gibbstv/instance_io.hpp"
#include "gibbstv/parallel.hpp"
#include "gibbstv/regime.hpp"
#include "gibbstv/sampler.hpp"
#include "gibbstv/suites.hpp"

using namespace gibbstv;
using nlohmann::ordered_json;

namespace {

struct Flags {
  std::uint64_t seed = 1;
  int threads = 0;
  double eps = 0.1;
  std::string mode = "auto";
  bool paper_strict = false;
  double c_mix = SamplerConfig{}.mixing_multiplier;
  double c_levels = CounterConfig{}.levels_multiplier;
  double c_T = 1.0;
  std::size_t t = 4;
  std::optional<double> kappa;
  std::optional<double> theta;
  double failure_prob = 1.0 / 3.0;
  bool json = false;
  bool exact = false;
  bool timing = false;
  bool plan = false;
};

EstimatorBudget budget_of(const Flags& f) {
  EstimatorBudget b;
  b.epsilon = f.eps;
  const auto m = parse_mode(f.mode);
  if (!m) throw InvalidInput("--mode: unknown mode \"" + f.mode + "\"");
  b.mode = *m;
  b.seed = f.seed;
  b.sampler.mixing_multiplier = f.c_mix;
  b.counter.sampler = b.sampler;
  b.counter.levels_multiplier = f.c_levels;
  b.c_T = f.c_T;
  b.t = f.t;
  b.kappa_override = f.kappa;
  b.theta_override = f.theta;
  b.paper_strict = f.paper_strict;
  b.exact = f.exact;
  b.failure_prob = f.failure_prob;
  const auto exec = f.threads == 1 ? Execution::serial : Execution::parallel;
  b.exec = exec;
  b.counter.exec = exec;
  return b;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string spins(const Configuration& x) {
  std::string s;
  for (auto v : x) s += v == 1 ? '+' : '-';
  return s;
}

void emit(const Flags& f, const std::string& command, const EstimateReport& rep,
          const EstimatorBudget& budget, const Instance& mu, const Instance& nu) {
  if (!f.json) {
    std::cout << report_text(rep, f.timing);
    return;
  }
  RunRecord rec;
  rec.report = rep;
  rec.mu_hash = instance_hash(mu);
  rec.nu_hash = instance_hash(nu);
  rec.seed = f.seed;
  rec.epsilon = f.eps;
  rec.mode = f.mode;
  rec.command = command;
  rec.include_timing = f.timing;
  std::cout << run_record_json(rec, budget);
}

int run_tv(const Flags& f, const std::string& a, const std::string& b) {
  const Instance mu = parse_instance_file(a), nu = parse_instance_file(b);
  const EstimatorBudget budget = budget_of(f);
  if (f.plan) {
    const DispatchPlan p = plan_dispatch(mu.model, nu.model, f.eps, budget);
    ordered_json j;
    j["branch"] = p.branch;
    j["error_kind"] = p.error_kind == ErrorKind::additive ? "additive" : "relative";
    j["inner_epsilon"] = p.inner_epsilon;
    j["d_par"] = p.d_par;
    j["theta"] = p.theta;
    j["b"] = p.b;
    j["C_tv_par"] = p.C_tv_par;
    j["K"] = p.K;
    j["planned_samples"] = p.planned_samples;
    j["repeats"] = p.repeats;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  Rng rng(f.seed);
  const EstimateReport rep = dispatch_tv(mu.model, nu.model, f.eps, budget, rng);
  emit(f, "tv", rep, budget, mu, nu);
  return 0;
}

int run_marginal(const Flags& f, const std::string& a, const std::string& b,
                 const std::string& subset) {
  const Instance mu = parse_instance_file(a), nu = parse_instance_file(b);
  std::vector<Vertex> S;
  for (const auto& l : split(subset, ',')) S.push_back(resolve_vertex(mu, l));
  const EstimatorBudget budget = budget_of(f);
  EstimateReport rep;
  if (f.exact) {
    rep.branch = "exact";
    rep.estimate = exact_marginal_tv(mu.model, nu.model, S, budget.exact_cap);
  } else {
    Rng rng(f.seed);
    rep = marginal_additive_tv(mu.model, nu.model, S, f.eps, budget, rng);
  }
  emit(f, "marginal-tv", rep, budget, mu, nu);
  return 0;
}

int run_count(const Flags& f, const std::string& path) {
  const Instance inst = parse_instance_file(path);
  const EstimatorBudget budget = budget_of(f);
  double log_z = 0.0;
  if (f.exact) {
    log_z = exact_partition(inst.model, budget.exact_cap);
  } else {
    Rng rng(f.seed);
    log_z = conditional_count(inst.model, {}, f.eps, budget.counter, rng);
  }
  if (f.json) {
    ordered_json j;
    j["log_Z"] = log_z;
    j["exact"] = f.exact;
    j["epsilon"] = f.eps;
    j["seed"] = f.seed;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << std::setprecision(12) << "log Z " << log_z << "\n";
  }
  return 0;
}

int run_sample(const Flags& f, const std::string& path, std::size_t num,
               const std::string& pin_text) {
  const Instance inst = parse_instance_file(path);
  Pinning pin(num_vertices(inst.model), 0);
  for (const auto& item : split(pin_text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidInput("--pin: expected label=+ or label=-, got " + item);
    const std::string val = item.substr(eq + 1);
    if (val != "+" && val != "-") throw InvalidInput("--pin: spin must be + or -, got " + val);
    pin[resolve_vertex(inst, item.substr(0, eq))] = val == "+" ? 1 : -1;
  }
  const EstimatorBudget budget = budget_of(f);
  const Sampler sampler(inst.model, pin, std::min(0.5, f.eps), budget.sampler);
  const auto draws = draw_values<Configuration>(num, f.seed, budget.exec,
                                                [&](Rng& r, std::size_t) { return sampler.draw(r); });
  if (f.json) {
    ordered_json j;
    j["vertices"] = inst.labels;
    ordered_json arr = ordered_json::array();
    for (const auto& x : draws) arr.push_back(spins(x));
    j["samples"] = arr;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& x : draws) std::cout << spins(x) << "\n";
  }
  return 0;
}

int run_check(const Flags& f, const std::string& path) {
  const Instance inst = parse_instance_file(path);
  const RegimeReport r = regime_report(inst.model);
  const Graph& g = graph_of(inst.model);
  ordered_json j;
  j["model"] = kind_of(inst.model) == ModelKind::hardcore ? "hardcore" : "ising";
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  j["max_degree"] = max_degree(g);
  j["uniqueness_gap"] = r.uniqueness_gap ? ordered_json(*r.uniqueness_gap) : ordered_json(nullptr);
  if (r.ising_condition) {
    j["ising_condition"] = to_string(r.ising_condition->tag);
    j["ising_witness"] = r.ising_condition->witness;
  } else {
    j["ising_condition"] = nullptr;
  }
  j["marginal_bound"] = r.marginal_bound;
  if (f.json) {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    std::cout << std::left << std::setw(16) << it.key() << it.value().dump() << "\n";
  return 0;
}

int run_reduce(const Flags& f, const std::string& path, bool shortcut) {
  const Instance inst = parse_instance_file(path);
  CountViaTvOptions opt;
  opt.low_degree_shortcut = shortcut;
  const auto r = count_via_tv_queries(graph_of(inst.model), opt);
  const auto truth = count_independent_sets(graph_of(inst.model));
  if (f.json) {
    ordered_json j;
    j["count"] = r.count;
    j["enumerated"] = truth;
    j["tv_queries"] = r.tv_queries;
    j["shortcut_vertices"] = r.shortcut_vertices;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "count        " << r.count << "\n"
              << "enumerated   " << truth << "\n"
              << "tv queries   " << r.tv_queries << "\n"
              << "shortcut     " << r.shortcut_vertices << " vertices\n";
  }
  if (r.count != truth) throw OracleError("reduction count differs from enumeration");
  return 0;
}

int run_suite_cmd(const Flags& f, const std::string& name, const std::string& csv) {
  if (!is_suite(name)) {
    std::string names;
    for (const auto& s : suite_names()) names += " " + s;
    throw InvalidInput("unknown suite \"" + name + "\"; choose one of" + names);
  }
  SuiteOptions opt;
  opt.seed = f.seed;
  opt.exec = f.threads == 1 ? Execution::serial : Execution::parallel;
  const auto rs = run_suite(name, opt);
  print_results(std::cout, rs);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw InvalidInput("cannot write " + csv);
    write_csv(out, rs);
  }
  for (const auto& r : rs)
    if (!r.passed) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total variation distance between Gibbs distributions"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  if (const char* t = std::getenv("GIBBS_TV_THREADS")) f.threads = std::atoi(t);
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--threads", f.threads, "worker threads (default: GIBBS_TV_THREADS or all)");
  app.add_option("--eps", f.eps, "target accuracy");
  app.add_option("--mode", f.mode, "auto, additive, basic-relative, advanced, marginal-additive");
  app.add_flag("--paper-strict", f.paper_strict, "fail on gate violations instead of warning");
  app.add_option("--c-mix", f.c_mix, "Glauber step multiplier");
  app.add_option("--c-levels", f.c_levels, "annealing level multiplier");
  app.add_option("--c-t", f.c_T, "multiplier on relative estimator sample counts");
  app.add_option("--t", f.t, "truncation size of the advanced estimator");
  app.add_option("--kappa", f.kappa, "big/small split threshold");
  app.add_option("--theta", f.theta, "advanced estimator distance threshold");
  app.add_option("--failure-prob", f.failure_prob, "boost by medians to this failure probability");
  app.add_flag("--json", f.json, "machine-readable output");
  app.add_flag("--exact", f.exact, "answer with exact enumeration");
  app.add_flag("--timing", f.timing, "include elapsed time");
  app.add_flag("--plan", f.plan, "print the dispatcher plan without running it");

  std::string mu, nu, model, subset, pin, suite, csv;
  std::size_t num = 1;
  bool no_shortcut = false;
  auto* tv = app.add_subcommand("tv", "estimate d_TV(mu, nu)");
  tv->add_option("mu", mu)->required();
  tv->add_option("nu", nu)->required();
  auto* mtv = app.add_subcommand("marginal-tv", "estimate the TV distance of projections");
  mtv->add_option("mu", mu)->required();
  mtv->add_option("nu", nu)->required();
  mtv->add_option("--subset", subset, "comma-separated vertex labels")->required();
  auto* count = app.add_subcommand("count", "approximate log partition function");
  count->add_option("model", model)->required();
  auto* sample = app.add_subcommand("sample", "draw configurations");
  sample->add_option("model", model)->required();
  sample->add_option("--num", num, "number of draws");
  sample->add_option("--pin", pin, "pinning, e.g. a=+,b=-");
  auto* check = app.add_subcommand("check", "report the regime of a model");
  check->add_option("model", model)->required();
  auto* reduce = app.add_subcommand("reduce-demo", "count independent sets through TV queries");
  reduce->add_option("model", model, "instance whose graph is used")->required();
  reduce->add_flag("--no-shortcut", no_shortcut, "skip the degree <= 2 transfer matrix");
  auto* suite_cmd = app.add_subcommand("suite", "run an acceptance suite");
  suite_cmd->add_option("name", suite)->required();
  suite_cmd->add_option("--csv", csv, "write per-case rows here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::invalid_input);
  }

  try {
    if (f.threads < 0) throw InvalidInput("--threads must be >= 0");
    set_num_threads(f.threads);
    if (*tv) return run_tv(f, mu, nu);
    if (*mtv) return run_marginal(f, mu, nu, subset);
    if (*count) return run_count(f, model);
    if (*sample) return run_sample(f, model, num, pin);
    if (*check) return run_check(f, model);
    if (*reduce) return run_reduce(f, model, !no_shortcut);
    if (*suite_cmd) return run_suite_cmd(f, suite, csv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::oracle_failure);
  }
  return 0;
}
