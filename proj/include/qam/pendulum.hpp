#pragma once

#include <utility>

#include "qam/errors.hpp"
#include "qam/map.hpp"

namespace qam {

/// Wannier-Stark pendulum H = J^2/2 + eps*V(theta), eps*V = -a_eps*theta +
/// k_eps*cos(theta). The potential is evaluated on the fixed branch
/// theta in [0, 2pi); it is multivalued across the cut but its derivatives
/// (and hence the flow) are not.
struct WsPendulum {
  double a_eps = 0.0;  // tilt, = drift of the map
  double k_eps = 0.0;  // sinusoid, = kick of the map

  bool has_island() const { return std::abs(a_eps) < std::abs(k_eps); }
};

/// eps*V on the branch theta in [0, 2pi) after wrapping.
double ws_potential(const WsPendulum& p, double theta);
/// eps*V without wrapping (for integrals crossing the cut).
double ws_potential_line(const WsPendulum& p, double theta);

double ws_energy(const PhaseState& s, const WsPendulum& p);

struct WsFixedPoints {
  double stable;    // potential minimum
  double unstable;  // potential maximum
};
WsFixedPoints ws_fixed_points(const WsPendulum& p);

struct SeparatrixData {
  double unstable_point = 0;
  double stable_point = 0;
  double enclosed_area = 0;
  std::pair<double, double> turning_points{0, 0};  // loop extent (P, Q)
  double energy = 0;                               // = potential at Q
  double j_max = 0;                                // max |J| on the loop
};

SeparatrixData ws_separatrix(const WsPendulum& p, double quadrature_tol = 1e-9);

/// Imaginary action S(A,B) through the barrier at the given energy:
/// integral of sqrt(2(epsV - E)) over the forbidden segment.
double ws_wkb_action(const WsPendulum& p, double energy,
                     double quadrature_tol = 1e-9);

/// omega_0 = (k_eps^2 - a_eps^2)^(1/4).
double ws_small_oscillation_frequency(const WsPendulum& p);

double ws_well_bottom_energy(const WsPendulum& p);
double ws_barrier_top_energy(const WsPendulum& p);

/// Action of the closed orbit at `energy` inside the well: (1/2pi) contour
/// integral of J dtheta. Strictly increasing in energy.
double ws_action_of_energy(const WsPendulum& p, double energy,
                           double quadrature_tol = 1e-9);

/// Inverse of ws_action_of_energy on [well bottom, separatrix].
double ws_energy_of_action(const WsPendulum& p, double action,
                           double tol = 1e-9);

/// d(energy)/d(action) by central differences; the orbit frequency.
double ws_orbit_frequency(const WsPendulum& p, double action,
                          double tol = 1e-9);

/// Separatrix loop sampled for export: (theta, +J) for the upper branch.
std::vector<std::pair<double, double>> ws_separatrix_curve(
    const WsPendulum& p, int n_points = 512, double quadrature_tol = 1e-9);

}  // namespace qam
