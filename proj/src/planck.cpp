#include "qam/planck.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qam {

PlanckSpec commensurate(double drift, double hbar_target, long n_max,
                        double rel_bound, double beta) {
  if (!(drift > 0))
    throw NoCommensurateValue("commensurate: drift must be positive");
  if (!(hbar_target > 0))
    throw NoCommensurateValue("commensurate: hbar must be positive");
  const double ratio = drift / hbar_target;  // target m/n

  long best_m = 0, best_n = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= n_max; ++n) {
    const long m = std::lround(ratio * static_cast<double>(n));
    if (m < 1) continue;
    const long g = std::gcd(m, n);
    if (n / g > n_max) continue;
    const double err = std::abs(ratio - static_cast<double>(m) / n);
    if (err < best_err * (1.0 - 1e-15)) {
      best_err = err;
      best_m = m / g;
      best_n = n / g;
    }
  }
  if (best_m == 0)
    throw NoCommensurateValue("commensurate: no admissible m/n <= n_max");

  const double snapped = drift * static_cast<double>(best_n) / best_m;
  if (std::abs(snapped - hbar_target) > rel_bound * hbar_target)
    throw NoCommensurateValue(
        "commensurate: snapping exceeds the relative bound");
  return {snapped, best_m, best_n, beta};
}

std::string planck_key(const PlanckSpec& p) {
  std::ostringstream os;
  os.precision(17);
  os << "hbar=" << p.hbar << ";m=" << p.m << ";n=" << p.n << ";beta=" << p.beta;
  return os.str();
}

}  // namespace qam
