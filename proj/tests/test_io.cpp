#include <doctest.h>

#include <string>

#include "gibbstv/errors.hpp"
#include "gibbstv/instance_io.hpp"
#include "helpers.hpp"

using namespace gibbstv;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_instance_text(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

bool same_model(const SpinSystem& a, const SpinSystem& b) {
  if (kind_of(a) != kind_of(b) || graph_of(a).edges() != graph_of(b).edges()) return false;
  if (const auto* h = std::get_if<HardcoreModel>(&a)) return h->lambda() == std::get<HardcoreModel>(b).lambda();
  const auto& x = std::get<IsingModel>(a);
  const auto& y = std::get<IsingModel>(b);
  if (x.edge_couplings() != y.edge_couplings()) return false;
  for (Vertex v = 0; v < num_vertices(a); ++v) {
    const auto &p = x.field(v), &q = y.field(v);
    if (p.is_finite() != q.is_finite()) return false;
    if (p.is_finite() ? p.value() != q.value() : p.infinite_sign() != q.infinite_sign()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("schema examples parse") {
  const auto edge = parse_instance_text(
      R"({"format":1,"model":"hardcore","vertices":["a","b"],"edges":[["a","b"]],"lambda":{"a":1.0,"b":1.0}})");
  CHECK(kind_of(edge.model) == ModelKind::hardcore);
  CHECK(graph_of(edge.model).num_edges() == 1);
  CHECK(edge.labels == std::vector<std::string>{"a", "b"});

  const auto is = parse_instance_text(
      R"({"format":1,"model":"ising","vertices":["a","b"],"edges":[["a","b"]],"J":[["a","b",0.25]],"h":{"a":"inf","b":0.0}})");
  const auto& m = std::get<IsingModel>(is.model);
  CHECK(m.edge_couplings()[0] == 0.25);
  CHECK(m.field(0).infinite_sign() > 0);
  CHECK_FALSE(m.is_soft());
  CHECK(resolve_vertex(is, "b") == 1);
  CHECK_THROWS_AS(resolve_vertex(is, "c"), InvalidInput);
}

TEST_CASE("parse errors name the field") {
  CHECK(error_of(R"({"format":1,"model":"hardcore","vertices":["x"],"lambda":{"x":-1}})").find("lambda.x") !=
        std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"hardcore","vertices":["x"]})").find("lambda") != std::string::npos);
  CHECK(error_of(R"({"format":2,"model":"hardcore","vertices":[],"lambda":{}})").find("format") != std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"potts","vertices":[]})").find("model") != std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"hardcore","vertices":["a"],"edges":[["a","z"]],"lambda":{"a":1}})")
            .find("edges[0]") != std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"ising","vertices":["a","b"],"edges":[["a","b"]],"J":[["a","b",0.1],["b","a",0.2]]})")
            .find("asymmetric") != std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"ising","vertices":["a"],"h":{"a":"nan"}})").find("h.a") != std::string::npos);
  CHECK(error_of(R"({"format":1,"model":"hardcore","vertices":["a","a"],"lambda":{"a":1}})").find("duplicate") !=
        std::string::npos);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
}

TEST_CASE("parse of emit is the identity") {
  Rng rng(21);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = share(gt::random_graph(n, 0.5, 4, rng));
    Instance inst{k % 2 ? SpinSystem(gt::random_hardcore(g, 0.0, 3.0, rng))
                        : SpinSystem(gt::random_ising(g, 1.0, 1.0, rng)),
                  default_labels(n)};
    if (k % 4 == 0) {
      auto is = std::get<IsingModel>(inst.model);
      std::vector<ExtendedReal> h(is.fields().begin(), is.fields().end());
      h[0] = ExtendedReal::neg_infinity();
      inst.model = IsingModel(g, is.edge_couplings(), h);
    }
    const std::string text = emit_instance(inst);
    const Instance back = parse_instance_text(text);
    CHECK(same_model(inst.model, back.model));
    CHECK(emit_instance(back) == text);
    CHECK(instance_hash(back) == instance_hash(inst));
  }
}

TEST_CASE("single-threaded run records are byte-identical") {
  const auto g = share(gt::cycle_graph(5));
  const auto mu = uniform_hardcore(g, 1.0), nu = uniform_hardcore(g, 1.1);
  EstimatorBudget budget;
  budget.exec = Execution::serial;
  budget.counter.exec = Execution::serial;
  budget.mode = Mode::additive;
  auto record = [&] {
    Rng rng(8);
    RunRecord rec;
    rec.report = dispatch_tv(mu, nu, 0.1, budget, rng);
    rec.seed = 8;
    rec.epsilon = 0.1;
    rec.mode = "additive";
    rec.command = "tv";
    return run_record_json(rec, budget);
  };
  const std::string a = record();
  CHECK(a == record());
  CHECK(a.find("elapsed_seconds") == std::string::npos);
  CHECK(a.find("\"branch\": \"additive\"") != std::string::npos);
}
