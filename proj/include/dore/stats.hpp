#pragma once

#include <span>
#include <string>

namespace dore {

struct TTestResult {
  std::string test;  // "paired-t" or "welch-t"
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // zero variance: statistic undefined, reported as t=0, p=1
  bool significant = false;  // p < 0.05 and not degenerate
};

/// Two-sided paired t-test over per-dialogue metric vectors. Requires equal
/// lengths >= 2; zero-variance differences are flagged degenerate.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// Two-sided Welch t-test over per-seed score vectors; lengths may differ but
/// each needs >= 2 samples. Zero variance on both sides is degenerate.
TTestResult independent_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace dore
