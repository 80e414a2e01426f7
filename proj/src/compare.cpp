#include "qam/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qam/errors.hpp"

namespace qam {

namespace {

// Snapped grid values are doubles produced by the same snapping code, so keys
// agree bit-for-bit across methods; quantize defensively anyway.
long long grid_key(double snapped) {
  return std::llround(snapped * 1e9);
}

}  // namespace

CompareReport compare_methods(const std::vector<DecayCurve>& curves,
                              double tolerance_factor) {
  std::map<long long, std::vector<const DecayPoint*>> by_point;
  for (const auto& c : curves)
    for (const auto& r : c.rows)
      by_point[grid_key(r.inv_hbar_snapped)].push_back(&r);

  CompareReport rep;
  rep.tolerance_factor = tolerance_factor;
  for (const auto& [key, pts] : by_point) {
    (void)key;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (pts[i]->method == pts[j]->method) continue;
        MethodPairRatio pr;
        pr.inv_hbar_snapped = pts[i]->inv_hbar_snapped;
        pr.method_a = pts[i]->method;
        pr.method_b = pts[j]->method;
        pr.gamma_a = pts[i]->gamma;
        pr.gamma_b = pts[j]->gamma;
        const double ratio = pr.gamma_a / pr.gamma_b;
        pr.factor = std::max(ratio, 1.0 / ratio);
        pr.flagged = pr.factor > tolerance_factor;
        rep.worst_factor = std::max(rep.worst_factor, pr.factor);
        if (pr.flagged) ++rep.flagged_count;
        rep.pairs.push_back(std::move(pr));
      }
    }
  }
  if (rep.pairs.empty())
    throw NoCommonPoints("compare_methods: curves share no grid points");
  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const MethodPairRatio& a, const MethodPairRatio& b) {
              if (a.inv_hbar_snapped != b.inv_hbar_snapped)
                return a.inv_hbar_snapped < b.inv_hbar_snapped;
              if (a.method_a != b.method_a) return a.method_a < b.method_a;
              return a.method_b < b.method_b;
            });
  return rep;
}

std::string compare_report_csv(const CompareReport& r) {
  std::ostringstream os;
  os.precision(16);
  os << "inv_hbar_snapped,method_a,method_b,gamma_a,gamma_b,factor,flagged\n";
  for (const auto& p : r.pairs)
    os << p.inv_hbar_snapped << ',' << p.method_a << ',' << p.method_b << ','
       << p.gamma_a << ',' << p.gamma_b << ',' << p.factor << ','
       << (p.flagged ? 1 : 0) << '\n';
  os << "# flagged " << r.flagged_count << " of " << r.pairs.size()
     << ", worst factor " << r.worst_factor << ", tolerance "
     << r.tolerance_factor << '\n';
  return os.str();
}

}  // namespace qam
