#pragma once

// Acceptance suites shared by the CLI `suite` command and the acceptance test.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gibbstv/parallel.hpp"

namespace gibbstv {

struct CsvRow {
  std::string suite;
  std::string case_id;
  std::uint64_t seed = 0;
  double budget = 0.0;
  double estimate = 0.0;
  double truth = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = true;
};

struct CriterionResult {
  std::string id;    // "C1".."C10" or a named extra check
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::vector<CsvRow> rows;
  // failing case ids with their instance seeds
  std::vector<std::string> failures;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  Execution exec = Execution::parallel;
};

// oracle-equivalence, lemma-bounds, estimator-accuracy, reduction-demo, variance-guard
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opt);

CriterionResult check_w_identity(const SuiteOptions& opt);          // 1
CriterionResult check_lower_bound(const SuiteOptions& opt);         // 2
CriterionResult check_small_field_lemmas(const SuiteOptions& opt);  // 3
CriterionResult check_truncation(const SuiteOptions& opt);          // 4
CriterionResult check_additive_coverage(const SuiteOptions& opt);   // 5
CriterionResult check_basic_coverage(const SuiteOptions& opt);      // 6
CriterionResult check_advanced_coverage(const SuiteOptions& opt);   // 7
CriterionResult check_counter(const SuiteOptions& opt);             // 8
CriterionResult check_reduction(const SuiteOptions& opt);           // 9
CriterionResult check_marginal_bound(const SuiteOptions& opt);      // 10
CriterionResult check_variance_gate(const SuiteOptions& opt);
CriterionResult check_f_variance(const SuiteOptions& opt);
CriterionResult check_budget_shapes(const SuiteOptions& opt);

// One line per result: PASS/FAIL, id, name, time, detail.
void print_results(std::ostream& os, const std::vector<CriterionResult>& rs);
void write_csv(std::ostream& os, const std::vector<CriterionResult>& rs);

}  // namespace gibbstv
