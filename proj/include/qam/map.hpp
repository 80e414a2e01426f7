#pragma once

#include <array>
#include <vector>

#include "qam/errors.hpp"

namespace qam {

inline constexpr double kPi = 3.141592653589793238462643383279503;
inline constexpr double kTwoPi = 6.283185307179586476925286766559006;

enum class MapSign { plus, minus };

/// Kicked-accelerator map:
///   theta' = theta +- J           (mod 2pi)
///   J'     = J + kick*sin(theta') +- drift
/// with both signs selected together by `sign` (minus is the branch used by
/// all reference parameter sets).
struct MapParams {
  double kick = 0.0;   // k~ >= 0
  double drift = 0.0;  // 2*pi*Omega >= 0
  MapSign sign = MapSign::minus;

  double sgn() const { return sign == MapSign::plus ? 1.0 : -1.0; }
};

struct PhaseState {
  double theta = 0.0;     // in [0, 2pi)
  double action_j = 0.0;  // J on the line
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);
/// Wraps into [-pi, pi).
double wrap_centered(double x);

PhaseState map_step(const PhaseState& s, const MapParams& p);

/// All states visited, including the initial one (size steps+1).
std::vector<PhaseState> iterate_map(const PhaseState& s0, const MapParams& p,
                                    long steps);

struct Mat2 {
  // row-major [[a11 a12], [a21 a22]]
  double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};
Mat2 operator*(const Mat2& a, const Mat2& b);

/// Derivative of map_step at s (evaluated with the post-step angle).
Mat2 tangent_step(const PhaseState& s, const MapParams& p);

struct FixedPointResult {
  PhaseState state;  // J = 0
  double trace = 0;
  bool stable = false;
};

/// Period-1 fixed point of the torus map; selects the |trace|<2 branch of
/// kick*sin(theta*) = -+drift when it exists.
FixedPointResult find_fixed_point(const MapParams& p);

struct PortraitPoint {
  double theta;
  double j;  // reduced to [-pi, pi)
  int seed;
};

std::vector<PortraitPoint> phase_portrait(const MapParams& p,
                                          const std::vector<PhaseState>& seeds,
                                          long steps);

/// True if |J_t - j_center| <= pi for all t <= horizon (torus-cell window).
bool orbit_bounded(const MapParams& p, const PhaseState& seed, double j_center,
                   long horizon);

/// Flood-fill area of the island around `center`: connected set of grid cells
/// whose orbits stay within the J window of width 2pi for `escape_horizon`
/// steps. Throws NotInIsland if the center itself escapes.
double island_area(const MapParams& p, const PhaseState& center,
                   double grid_step = 0.02, long escape_horizon = 10000);

/// Area enclosed by the invariant curve traced by `seed`'s orbit around
/// `center` (angle-sorted shoelace over n_points iterates).
double orbit_enclosed_area(const MapParams& p, const PhaseState& seed,
                           const PhaseState& center, long n_points = 20000);

struct PeriodicOrbit {
  PhaseState point;
  int period = 1;
  double residual = 0;
};

/// Damped Newton search for a period-r point of the torus map from `seed`.
PeriodicOrbit find_periodic_orbit(const MapParams& p, const PhaseState& seed,
                                  int period, double tol = 1e-10,
                                  int max_iter = 400);

/// Trace of the product of r tangent maps along a period-r orbit.
/// Throws NotPeriodic if the orbit does not close to closure_tol.
double monodromy_trace(const MapParams& p, const PhaseState& orbit_point,
                       int period, double closure_tol = 1e-8);

}  // namespace qam
