#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bai::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  // 10^4 replications and statistical tolerances widened by 2.
  bool fast = false;
  unsigned threads = 0;
  // Called after each criterion finishes, in order.
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_all(const Options& options);

// One line per criterion: "[PASS] 3 name (1.2 s): detail".
std::string format_line(const CriterionResult& r);

}  // namespace bai::acceptance
