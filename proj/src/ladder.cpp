#include "qam/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace qam {

double wkb_rate(const WsPendulum& p, double hbar, WkbEnergy energy_choice,
                double quadrature_tol) {
  const double omega0 = ws_small_oscillation_frequency(p);
  double energy = ws_well_bottom_energy(p);
  if (energy_choice == WkbEnergy::harmonic_ground) {
    energy += 0.5 * hbar * omega0;
    if (energy > ws_barrier_top_energy(p))
      throw EnergyOutOfRange("wkb_rate: harmonic ground above barrier top");
  }
  const double s = ws_wkb_action(p, energy, quadrature_tol);
  return omega0 / kTwoPi * std::exp(-2.0 * s / hbar);
}

LadderSpec build_ladder(const ResonanceChain& chain, double hbar,
                        double island_area, int n_i) {
  if (!(island_area > kTwoPi * hbar))
    throw EmptyLadder("build_ladder: island holds no state (A <= 2 pi hbar)");
  LadderSpec spec;
  spec.chain = chain;
  spec.hbar = hbar;
  spec.island_area = island_area;
  spec.n_i = n_i;
  const long r = chain.r;
  spec.length = static_cast<long>(
      std::floor((island_area / (kTwoPi * hbar) - 1.0) / static_cast<double>(r)));
  if (spec.length < 0) throw EmptyLadder("build_ladder: negative length");
  spec.n_rs = chain.i_rs / hbar - 0.5;
  // n0 = in-ladder rung nearest the resonant action, clamped to the ladder.
  long hop = std::lround((spec.n_rs - n_i) / static_cast<double>(r));
  hop = std::clamp<long>(hop, 0, spec.length);
  spec.n0 = n_i + hop * r;
  spec.delta_n = static_cast<double>(spec.n0) - spec.n_rs;
  spec.n_star_lo = -hop;
  spec.n_star_hi = spec.length - hop;
  return spec;
}

std::vector<double> unperturbed_diagonal(const LadderSpec& spec) {
  std::vector<double> w(static_cast<std::size_t>(spec.length) + 1);
  const double pref = spec.hbar * spec.hbar / (2.0 * spec.chain.mass);
  for (long n = spec.n_star_lo; n <= spec.n_star_hi; ++n) {
    const double x = static_cast<double>(spec.chain.r) * n + spec.delta_n;
    w[static_cast<std::size_t>(n - spec.n_star_lo)] = pref * x * x;
  }
  return w;
}

std::vector<double> semiclassical_diagonal(const LadderSpec& spec,
                                           const WsPendulum& pendulum,
                                           double quadrature_tol) {
  const double e_top = ws_barrier_top_energy(pendulum);
  const double i_max = ws_action_of_energy(pendulum, e_top, quadrature_tol);
  auto level = [&](double action) {
    if (action < 0 || action > i_max)
      throw ActionOutsideIsland(
          "semiclassical_diagonal: quantized action outside the island");
    return ws_energy_of_action(pendulum, action, quadrature_tol);
  };
  const double s_over_r = static_cast<double>(spec.chain.s) / spec.chain.r;
  // Offset chosen so the value at the expansion point I_rs matches Eq-form
  // W(0) when delta_n = 0.
  const double offset = level(spec.chain.i_rs) +
                        kTwoPi * spec.hbar * s_over_r * spec.delta_n;
  std::vector<double> w(static_cast<std::size_t>(spec.length) + 1);
  for (long n = spec.n_star_lo; n <= spec.n_star_hi; ++n) {
    const double quantum = static_cast<double>(spec.n0 + n * spec.chain.r) + 0.5;
    const double e = level(quantum * spec.hbar);
    w[static_cast<std::size_t>(n - spec.n_star_lo)] =
        e - kTwoPi * spec.hbar * spec.chain.s * static_cast<double>(n) - offset;
  }
  return w;
}

LadderSpectrum ladder_eigensolve(const std::vector<double>& diagonal, double v,
                                 long n_star_lo) {
  if (v < 0) throw Error("ladder_eigensolve: coupling must be >= 0");
  const int n = static_cast<int>(diagonal.size());
  LadderSpectrum out;
  out.diagonal = diagonal;
  out.coupling = v;
  out.n_star_lo = n_star_lo;

  std::vector<double> d = diagonal;
  std::vector<double> e(static_cast<std::size_t>(std::max(0, n - 1)), v);
  Eigen::MatrixXd zmat = Eigen::MatrixXd::Identity(n, n);
  if (n > 1) {
    const int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(),
                                   zmat.data(), n);
    if (info != 0)
      throw ConvergenceFailure("ladder_eigensolve: dstev info=" +
                               std::to_string(info));
  }
  // dstev returns ascending eigenvalues; relabel by localization site.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<long> site(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Eigen::Index arg;
    zmat.col(k).cwiseAbs().maxCoeff(&arg);
    site[static_cast<std::size_t>(k)] = n_star_lo + static_cast<long>(arg);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (site[static_cast<std::size_t>(a)] != site[static_cast<std::size_t>(b)])
      return site[static_cast<std::size_t>(a)] < site[static_cast<std::size_t>(b)];
    return d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(b)];
  });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  out.site.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const int k = order[static_cast<std::size_t>(m)];
    out.eigenvalues[m] = d[static_cast<std::size_t>(k)];
    out.eigenvectors.col(m) = zmat.col(k);
    out.site[static_cast<std::size_t>(m)] = site[static_cast<std::size_t>(k)];
  }
  return out;
}

double geometric_gap(const LadderSpectrum& s, int m) {
  const int n = static_cast<int>(s.eigenvalues.size());
  if (n < 2) throw Error("geometric_gap: need L >= 1");
  const double scale = s.eigenvalues.cwiseAbs().maxCoeff();
  double acc = 0;
  for (int j = 0; j < n; ++j) {
    if (j == m) continue;
    const double gap = std::abs(s.eigenvalues[j] - s.eigenvalues[m]);
    if (gap < 1e-14 * std::max(scale, 1e-300))
      throw DegenerateSpectrum("geometric_gap: |E_j - E_m| vanishes");
    acc += std::log(gap);
  }
  return std::exp(acc / static_cast<double>(n - 1));
}

double rat_rate(const LadderSpectrum& s, const LadderSpec& spec, int m) {
  const double v = s.coupling;
  const double hops =
      static_cast<double>(spec.n_star_hi - s.site[static_cast<std::size_t>(m)]);
  const double base = v * v / (spec.hbar * spec.hbar);
  if (s.eigenvalues.size() < 2) return base;  // gateway only, zero hops
  const double d = geometric_gap(s, m);
  return base * std::pow(v / d, 2.0 * hops);
}

double xi0_explicit(const LadderSpec& spec) {
  const long l = spec.length;
  if (l < 1)
    throw Error("xi0_explicit: ladder has no hops (L = 0)");
  const double n_eff = spec.n_rs - static_cast<double>(spec.n_i);
  const double r = spec.chain.r;
  double sum = 0;
  for (long j = 1; j <= l; ++j) {
    const double term =
        std::abs(r * r * static_cast<double>(j) * j -
                 2.0 * n_eff * r * static_cast<double>(j));
    const double scale = r * r * static_cast<double>(j) * j +
                         std::abs(2.0 * n_eff * r * static_cast<double>(j));
    if (term <= 1e-12 * scale)
      throw DegenerateUnperturbed(
          "xi0_explicit: unperturbed gap vanishes at j=" + std::to_string(j));
    sum += std::log(term);
  }
  return std::log(spec.hbar * spec.hbar / (2.0 * spec.chain.mass * spec.chain.coupling)) +
         sum / static_cast<double>(l);
}

double gamma0_from_xi0(const LadderSpec& spec, double xi0) {
  const double v = spec.chain.coupling;
  return v * v / (spec.hbar * spec.hbar) *
         std::exp(-2.0 * xi0 * static_cast<double>(spec.length));
}

ContinuumRate continuum_rate(const LadderSpec& spec) {
  const double a = spec.island_area;
  const double m = spec.chain.mass;
  const double v = spec.chain.coupling;
  const double x = kTwoPi * spec.chain.i_rs / a;
  auto xlnx = [](double t) { return t == 0.0 ? 0.0 : t * std::log(std::abs(t)); };
  ContinuumRate out;
  // 2x ln(2x) + (1-2x) ln|1-2x|, with the 0*ln0 limits handled.
  out.xi0 = -std::log(8.0 * kPi * kPi * m * v / (a * a)) - 2.0 + xlnx(2.0 * x) +
            xlnx(1.0 - 2.0 * x);
  out.gamma0 = v * v / (spec.hbar * spec.hbar) *
               std::exp(-out.xi0 * a / (kPi * spec.chain.r * spec.hbar));
  return out;
}

std::vector<DegeneracyPoint> degeneracy_points(const ResonanceChain& chain,
                                               int n_i, int l_max,
                                               double island_area) {
  std::vector<DegeneracyPoint> out;
  for (int l = 1; l <= l_max; ++l) {
    DegeneracyPoint pt;
    pt.l = l;
    pt.inv_hbar =
        (2.0 * n_i + static_cast<double>(l) * chain.r + 1.0) / (2.0 * chain.i_rs);
    const double hbar = 1.0 / pt.inv_hbar;
    long length = -1;
    if (island_area > kTwoPi * hbar)
      length = static_cast<long>(std::floor(
          (island_area / (kTwoPi * hbar) - 1.0) / static_cast<double>(chain.r)));
    pt.valid = length >= l;
    out.push_back(pt);
  }
  return out;
}

DecayCurve rat_curve(const ResonanceChain& chain, double island_area,
                     const std::vector<double>& inv_hbar_grid, RatVariant v,
                     int n_i, const WsPendulum* pendulum) {
  DecayCurve curve;
  for (double inv_hbar : inv_hbar_grid) {
    const double hbar = 1.0 / inv_hbar;
    DecayPoint row;
    row.inv_hbar_requested = inv_hbar;
    row.inv_hbar_snapped = inv_hbar;  // theory curves need no snapping
    row.w = std::numeric_limits<double>::quiet_NaN();
    row.nu_or_rho = n_i;
    row.overlap = -1;
    try {
      const LadderSpec spec = build_ladder(chain, hbar, island_area, n_i);
      switch (v) {
        case RatVariant::unperturbed: {
          if (spec.length < 1) {
            row.gamma = chain.coupling * chain.coupling / (hbar * hbar);
          } else {
            row.gamma = gamma0_from_xi0(spec, xi0_explicit(spec));
          }
          row.method = "rat_unperturbed";
          break;
        }
        case RatVariant::perturbed: {
          const auto s = ladder_eigensolve(unperturbed_diagonal(spec),
                                           chain.coupling, spec.n_star_lo);
          row.gamma = rat_rate(s, spec, 0);
          row.method = "rat_perturbed";
          break;
        }
        case RatVariant::semiclassical: {
          if (!pendulum)
            throw Error("rat_curve: semiclassical variant needs a pendulum");
          const auto s =
              ladder_eigensolve(semiclassical_diagonal(spec, *pendulum),
                                chain.coupling, spec.n_star_lo);
          row.gamma = rat_rate(s, spec, 0);
          row.method = "rat_semiclassical";
          break;
        }
        case RatVariant::continuum: {
          row.gamma = continuum_rate(spec).gamma0;
          row.method = "rat_continuum";
          break;
        }
      }
    } catch (const Error&) {
      continue;  // out-of-validity points are simply absent from the curve
    }
    if (row.gamma > 0) curve.rows.push_back(std::move(row));
  }
  curve.canonicalize();
  return curve;
}

DecayCurve wkb_curve(const WsPendulum& p, const std::vector<double>& grid,
                     WkbEnergy energy_choice) {
  DecayCurve curve;
  for (double inv_hbar : grid) {
    DecayPoint row;
    row.inv_hbar_requested = inv_hbar;
    row.inv_hbar_snapped = inv_hbar;
    row.w = std::numeric_limits<double>::quiet_NaN();
    row.overlap = -1;
    try {
      row.gamma = wkb_rate(p, 1.0 / inv_hbar, energy_choice);
    } catch (const Error&) {
      continue;
    }
    row.method = energy_choice == WkbEnergy::well_bottom ? "wkb_bottom"
                                                         : "wkb_ground";
    if (row.gamma > 0) curve.rows.push_back(std::move(row));
  }
  curve.canonicalize();
  return curve;
}

}  // namespace qam
