#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qam/curve.hpp"
#include "qam/pendulum.hpp"
#include "qam/resonance.hpp"

namespace qam {

enum class WkbEnergy { well_bottom, harmonic_ground };

/// Gamma = (omega_0 / 2pi) exp(-2 S(E) / hbar), with S from ws_wkb_action at
/// the well bottom or at the harmonic ground energy bottom + hbar*omega_0/2.
double wkb_rate(const WsPendulum& p, double hbar, WkbEnergy energy_choice,
                double quadrature_tol = 1e-9);

/// Quasi-degenerate ladder of in-island states n = n_i, n_i + r, ... with
/// rung N counted from n0 (the in-ladder rung nearest the resonant action).
struct LadderSpec {
  ResonanceChain chain;
  double hbar = 1;
  double island_area = 0;  // A, from the flood-fill measurement
  int n_i = 0;             // innermost rung quantum number
  long n0 = 0;
  double n_rs = 0;         // I_rs/hbar - 1/2
  double delta_n = 0;      // n0 - n_rs
  long n_star_lo = 0;      // N_*, innermost rung index (<= 0)
  long n_star_hi = 0;      // N*, gateway rung index
  long length = 0;         // L = N* - N_*
};

/// Ladder length from L = Int[(A/(2 pi hbar) - 1)/r]; throws EmptyLadder when
/// the island holds no state. The default ladder is the one through the
/// island ground state (n_i = 0); pass n_i = 1 for first-excited scans.
LadderSpec build_ladder(const ResonanceChain& chain, double hbar,
                        double island_area, int n_i = 0);

/// W(N) = (hbar^2 / 2M)(rN + delta_n)^2 for N = N_*..N*.
std::vector<double> unperturbed_diagonal(const LadderSpec& spec);

/// Diagonal from the quantized WS tori: e_{n0+Nr} - 2 pi hbar s N minus the
/// offset that makes it match the quadratic form at the expansion point.
std::vector<double> semiclassical_diagonal(const LadderSpec& spec,
                                           const WsPendulum& pendulum,
                                           double quadrature_tol = 1e-9);

/// Symmetric tridiagonal eigensolve of the ladder Hamiltonian. Eigenstates
/// are labeled m = 0..L by localization site N_m (innermost first), so m = 0
/// is always the state deepest in the island.
struct LadderSpectrum {
  std::vector<double> diagonal;
  double coupling = 0;
  Eigen::VectorXd eigenvalues;   // in m-order
  Eigen::MatrixXd eigenvectors;  // column m
  std::vector<long> site;        // N_m
  long n_star_lo = 0;
};

LadderSpectrum ladder_eigensolve(const std::vector<double>& diagonal, double v,
                                 long n_star_lo);

/// Geometric average D_m of |E_j - E_m| over j != m.
double geometric_gap(const LadderSpectrum& s, int m);

/// Gamma_m = (v^2/hbar^2) (v / D_m)^(2 (N* - N_m)).
double rat_rate(const LadderSpectrum& s, const LadderSpec& spec, int m);

/// xi_0 = ln(hbar^2 / 2Mv) + (1/L) sum_j ln|r^2 j^2 - 2 (n_rs - n_i) r j|.
double xi0_explicit(const LadderSpec& spec);

/// Gamma_0 from xi_0: (v^2/hbar^2) exp(-2 xi_0 L).
double gamma0_from_xi0(const LadderSpec& spec, double xi0);

struct ContinuumRate {
  double xi0;
  double gamma0;
};

/// Continuum (quasiclassical) limit with x = 2 pi I_rs / A.
ContinuumRate continuum_rate(const LadderSpec& spec);

struct DegeneracyPoint {
  int l;
  double inv_hbar;
  bool valid;  // ladder-length condition L(hbar) >= l
};

/// 1/hbar = (2 n_i + l r + 1) / (2 I_rs) for l = 1..l_max.
std::vector<DegeneracyPoint> degeneracy_points(const ResonanceChain& chain,
                                               int n_i, int l_max,
                                               double island_area);

enum class RatVariant { unperturbed, perturbed, semiclassical, continuum };

/// Theory curve for the m = 0 (innermost) state over a 1/hbar grid, in the
/// shared DecayCurve schema. Points where the formula degenerates are skipped.
DecayCurve rat_curve(const ResonanceChain& chain, double island_area,
                     const std::vector<double>& inv_hbar_grid, RatVariant v,
                     int n_i = 0, const WsPendulum* pendulum = nullptr);

DecayCurve wkb_curve(const WsPendulum& p, const std::vector<double>& grid,
                     WkbEnergy energy_choice);

}  // namespace qam
