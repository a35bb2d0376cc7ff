#pragma once

#include <string>
#include <vector>

namespace lcfg {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed error (units depend on the check)
  double tolerance = 0.0;
  std::string detail;
};

/// Suites accepted by run_verify_suite, excluding "all".
const std::vector<std::string>& verify_suite_names();

/// Runs a named property suite ("theorem1", "decomposition", "cpca", "gmm" or "all") on
/// built-in synthetic instances with fixed seeds.
std::vector<CheckResult> run_verify_suite(const std::string& suite);

}  // namespace lcfg
