#pragma once

#include <string>

#include "qam/errors.hpp"

namespace qam {

/// Effective Planck constant with its commensurability decomposition
/// drift = m*hbar/n (gcd(m,n)=1) and the quasimomentum of the Bloch sector.
struct PlanckSpec {
  double hbar = 1.0;
  long m = 1;
  long n = 1;
  double beta = 0.0;  // quasimomentum in [0, 1)

  double inv_hbar() const { return 1.0 / hbar; }
  double bloch_period(double drift) const { return hbar / drift; }
};

/// Snaps hbar_target to the nearest value making drift/hbar = m/n rational
/// with n <= n_max. Throws NoCommensurateValue if the snap would move hbar
/// by more than rel_bound (relative).
PlanckSpec commensurate(double drift, double hbar_target, long n_max = 16,
                        double rel_bound = 1e-3, double beta = 0.0);

std::string planck_key(const PlanckSpec& p);

}  // namespace qam
