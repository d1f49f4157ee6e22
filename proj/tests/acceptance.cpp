// One PASS/FAIL line per acceptance criterion. Optional argument: CSV path.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "gibbstv/suites.hpp"

int main(int argc, char** argv) {
  using namespace gibbstv;
  SuiteOptions opt;
  if (const char* s = std::getenv("GIBBS_TV_ACCEPTANCE_SEED")) opt.seed = std::strtoull(s, nullptr, 10);
  const auto checks = {check_w_identity,        check_lower_bound,      check_small_field_lemmas,
                       check_truncation,        check_additive_coverage, check_basic_coverage,
                       check_advanced_coverage, check_counter,          check_reduction,
                       check_marginal_bound,    check_variance_gate,    check_f_variance,
                       check_budget_shapes};
  // GIBBS_TV_ONLY=3,7 runs a subset (by position, 1-based)
  std::string only;
  if (const char* s = std::getenv("GIBBS_TV_ONLY")) only = "," + std::string(s) + ",";
  std::vector<CriterionResult> all;
  std::size_t index = 0;
  bool ok = true;
  for (auto check : checks) {
    ++index;
    if (!only.empty() && only.find("," + std::to_string(index) + ",") == std::string::npos) continue;
    all.push_back(check(opt));
    print_results(std::cout, {all.back()});
    std::cout.flush();
    ok = ok && all.back().passed;
  }
  if (argc > 1) {
    std::ofstream csv(argv[1]);
    write_csv(csv, all);
  }
  std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << '\n';
  return ok ? 0 : 1;
}
