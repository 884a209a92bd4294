// Acceptance suite: runs the ten verification criteria end to end and
// prints one PASS/FAIL line per criterion.  Exit code 0 iff every selected
// criterion passes.  Usage: acceptance [criterion-number]
#include <chrono>
#include <cstdio>
#include <cstring>

#include <torlevy/verify.hpp>

using namespace torlevy;

namespace {

struct Criterion {
  int number;
  const char* label;
  SuiteResult (*run)(const VerifyOptions&);
};

const Criterion kCriteria[] = {
    {1, "operator symbol agreement (two independent quadratures, <= 1e-4)",
     check_symbol_agreement},
    {2, "two-sided symbol bound over random ensembles, grid-stable (+-15%)",
     check_symbol_equivalence},
    {3, "two-sided bound for the variable kernel, grid-stable (+-15%)",
     check_variable_kernel_equivalence},
    {4, "near-field remainder bound with the Dini-rate sweep",
     check_dini_remainder},
    {5, "translation and interpolation inequalities, p-uniform",
     check_norm_inequalities},
    {6, "sampled process matches the exponent within 3 SE",
     check_semigroup},
    {7, "maximal-regularity constant finite, time-grid stable (+-20%)",
     check_maximal_regularity},
    {8, "a priori estimate bounded, refinement-stable, mollification-uniform",
     check_apriori},
    {9, "continuity method contracts and matches the direct solve",
     check_continuity_method},
    {10, "nonlinear flow: first-order quadratic case, decreasing energy",
     check_nonlinear_flow},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  VerifyOptions opt;  // pinned defaults: n = 128, ensemble = 100, 1e4 paths
  bool all_ok = true;
  for (const auto& crit : kCriteria) {
    if (only != 0 && crit.number != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult res;
    bool threw = false;
    std::string what;
    try {
      res = crit.run(opt);
    } catch (const std::exception& e) {
      threw = true;
      what = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = !threw && res.passed;
    all_ok = all_ok && ok;
    std::printf("%s criterion %2d: %s  [%.1fs]\n", ok ? "PASS" : "FAIL", crit.number, crit.label,
                secs);
    if (threw) {
      std::printf("       exception: %s\n", what.c_str());
    } else {
      for (const auto& f : res.failures) std::printf("       %s\n", f.c_str());
      for (const auto& m : res.metrics) std::printf("       %s = %.6g\n", m.name.c_str(), m.value);
    }
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
