#pragma once

#include <string>
#include <vector>

#include "qam/curve.hpp"

namespace qam {

struct MethodPairRatio {
  double inv_hbar_snapped = 0;
  std::string method_a;
  std::string method_b;
  double gamma_a = 0;
  double gamma_b = 0;
  double factor = 1;  // max(ratio, 1/ratio)
  bool flagged = false;
};

struct CompareReport {
  std::vector<MethodPairRatio> pairs;
  double tolerance_factor = 2;
  int flagged_count = 0;
  double worst_factor = 1;
};

/// Per-point ratio table across methods at shared snapped 1/hbar values.
/// Throws NoCommonPoints when no two curves share a grid point.
CompareReport compare_methods(const std::vector<DecayCurve>& curves,
                              double tolerance_factor);

std::string compare_report_csv(const CompareReport& r);

}  // namespace qam
