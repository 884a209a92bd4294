#pragma once

#include "torlevy/report.hpp"
#include "torlevy/solver.hpp"

namespace torlevy {

struct VerifyOptions {
  int n = 128;                // base d = 1 grid
  int ensemble = 100;         // polynomials per ensemble sweep
  std::uint64_t seed = 2024;
  int n_paths = 10000;
  int time_steps = 64;
  bool quick = false;  // smaller ensembles for CLI smoke runs
};

struct Metric {
  std::string name;
  double value;
};

struct SuiteResult {
  std::string suite;
  bool passed = true;
  std::vector<Metric> metrics;
  std::vector<std::string> failures;
  CsvTable csv;

  void metric(const std::string& name, double v) { metrics.push_back({name, v}); }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      passed = false;
      failures.push_back(what);
    }
  }
  Json to_json() const;
};

// One checker per acceptance criterion; every tolerance is pinned here.
SuiteResult check_symbol_agreement(const VerifyOptions& opt);            // criterion 1
SuiteResult check_symbol_equivalence(const VerifyOptions& opt);          // criterion 2
SuiteResult check_variable_kernel_equivalence(const VerifyOptions& opt); // criterion 3
SuiteResult check_dini_remainder(const VerifyOptions& opt);              // criterion 4
SuiteResult check_norm_inequalities(const VerifyOptions& opt);           // criterion 5
SuiteResult check_semigroup(const VerifyOptions& opt);                   // criterion 6
SuiteResult check_maximal_regularity(const VerifyOptions& opt);          // criterion 7
SuiteResult check_apriori(const VerifyOptions& opt);                     // criterion 8
SuiteResult check_continuity_method(const VerifyOptions& opt);           // criterion 9
SuiteResult check_nonlinear_flow(const VerifyOptions& opt);              // criterion 10

// CLI suite names -> the checkers they aggregate
std::vector<SuiteResult> run_suite(const std::string& name, const VerifyOptions& opt);

}  // namespace torlevy
