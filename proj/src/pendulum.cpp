#include "qam/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qam/quadrature.hpp"

namespace qam {

namespace {

void require_island(const WsPendulum& p, const char* who) {
  if (!p.has_island())
    throw NoIsland(std::string(who) + ": |a_eps| >= |k_eps|, no island");
}

// Bisection to near machine precision; f(a) and f(b) must bracket a root
// (f(b) == 0 accepted).
double root_bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw QuadratureFailure("root_bisect: endpoints do not bracket a root");
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0 || (b - a) < 1e-15 * (std::abs(a) + std::abs(b) + 1.0))
      return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double ws_potential_line(const WsPendulum& p, double theta) {
  return -p.a_eps * theta + p.k_eps * std::cos(theta);
}

double ws_potential(const WsPendulum& p, double theta) {
  return ws_potential_line(p, wrap_angle(theta));
}

double ws_energy(const PhaseState& s, const WsPendulum& p) {
  return 0.5 * s.action_j * s.action_j + ws_potential(p, s.theta);
}

WsFixedPoints ws_fixed_points(const WsPendulum& p) {
  require_island(p, "ws_fixed_points");
  const double x = std::asin(p.a_eps / p.k_eps);
  return {wrap_angle(kPi + x), wrap_angle(kTwoPi - x)};
}

double ws_small_oscillation_frequency(const WsPendulum& p) {
  require_island(p, "ws_small_oscillation_frequency");
  return std::pow(p.k_eps * p.k_eps - p.a_eps * p.a_eps, 0.25);
}

double ws_well_bottom_energy(const WsPendulum& p) {
  const auto fp = ws_fixed_points(p);
  return ws_potential_line(p, fp.stable);
}

double ws_barrier_top_energy(const WsPendulum& p) {
  const auto fp = ws_fixed_points(p);
  return ws_potential_line(p, fp.unstable);
}

SeparatrixData ws_separatrix(const WsPendulum& p, double quadrature_tol) {
  require_island(p, "ws_separatrix");
  const auto fp = ws_fixed_points(p);
  // stable/unstable points both lie in (pi, 2pi]; the loop endpoint P lies in
  // [0, stable) on the same branch.
  const double e_sep = ws_potential_line(p, fp.unstable);
  auto f = [&](double th) { return ws_potential_line(p, th) - e_sep; };
  const double theta_p =
      (p.a_eps == 0.0) ? 0.0 : root_bisect(f, 0.0, fp.stable);
  auto integrand = [&](double th) {
    const double d = e_sep - ws_potential_line(p, th);
    return d > 0 ? std::sqrt(2.0 * d) : 0.0;
  };
  SeparatrixData out;
  out.unstable_point = fp.unstable;
  out.stable_point = fp.stable;
  out.energy = e_sep;
  out.turning_points = {theta_p, fp.unstable};
  out.enclosed_area =
      2.0 * integrate_sqrt_endpoints(integrand, theta_p, fp.unstable,
                                     quadrature_tol);
  out.j_max = std::sqrt(2.0 * (e_sep - ws_potential_line(p, fp.stable)));
  return out;
}

std::vector<std::pair<double, double>> ws_separatrix_curve(
    const WsPendulum& p, int n_points, double quadrature_tol) {
  const auto sep = ws_separatrix(p, quadrature_tol);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(static_cast<std::size_t>(n_points));
  const auto [a, b] = sep.turning_points;
  for (int i = 0; i < n_points; ++i) {
    const double th = a + (b - a) * i / static_cast<double>(n_points - 1);
    const double d = sep.energy - ws_potential_line(p, th);
    curve.emplace_back(th, d > 0 ? std::sqrt(2.0 * d) : 0.0);
  }
  return curve;
}

double ws_wkb_action(const WsPendulum& p, double energy, double quadrature_tol) {
  require_island(p, "ws_wkb_action");
  const auto fp = ws_fixed_points(p);
  const double e_bot = ws_potential_line(p, fp.stable);
  const double e_top = ws_potential_line(p, fp.unstable);
  const double slack = 1e-12 * (std::abs(e_bot) + std::abs(e_top) + 1.0);
  if (energy < e_bot - slack || energy > e_top + slack)
    throw EnergyOutOfRange("ws_wkb_action: energy outside [bottom, barrier]");
  energy = std::clamp(energy, e_bot, e_top);
  if (energy == e_top) return 0.0;

  auto f = [&](double th) { return ws_potential_line(p, th) - energy; };
  // Inner turning point A on the barrier's near side, exit point B beyond it.
  const double theta_a =
      (energy == e_bot) ? fp.stable : root_bisect(f, fp.stable, fp.unstable);
  const double theta_b = root_bisect(f, fp.unstable, fp.stable + kTwoPi);
  auto integrand = [&](double th) {
    const double d = ws_potential_line(p, th) - energy;
    return d > 0 ? std::sqrt(2.0 * d) : 0.0;
  };
  return integrate_sqrt_endpoints(integrand, theta_a, theta_b, quadrature_tol);
}

double ws_action_of_energy(const WsPendulum& p, double energy,
                           double quadrature_tol) {
  require_island(p, "ws_action_of_energy");
  const auto fp = ws_fixed_points(p);
  const double e_bot = ws_potential_line(p, fp.stable);
  const double e_top = ws_potential_line(p, fp.unstable);
  const double slack = 1e-12 * (std::abs(e_bot) + std::abs(e_top) + 1.0);
  if (energy < e_bot - slack || energy > e_top + slack)
    throw EnergyOutOfRange("ws_action_of_energy: energy outside island range");
  energy = std::clamp(energy, e_bot, e_top);
  if (energy == e_bot) return 0.0;

  auto f = [&](double th) { return ws_potential_line(p, th) - energy; };
  const double theta_l = root_bisect(f, fp.unstable - kTwoPi, fp.stable);
  const double theta_r =
      (energy == e_top) ? fp.unstable : root_bisect(f, fp.stable, fp.unstable);
  auto integrand = [&](double th) {
    const double d = energy - ws_potential_line(p, th);
    return d > 0 ? std::sqrt(2.0 * d) : 0.0;
  };
  return integrate_sqrt_endpoints(integrand, theta_l, theta_r, quadrature_tol) /
         kPi;
}

double ws_energy_of_action(const WsPendulum& p, double action, double tol) {
  require_island(p, "ws_energy_of_action");
  const double e_bot = ws_well_bottom_energy(p);
  const double e_top = ws_barrier_top_energy(p);
  const double i_max = ws_action_of_energy(p, e_top, tol);
  if (action < -1e-12 || action > i_max * (1.0 + 1e-9))
    throw EnergyOutOfRange("ws_energy_of_action: action outside island");
  if (action <= 0) return e_bot;
  double lo = e_bot, hi = e_top;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ws_action_of_energy(p, mid, tol) < action)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (std::abs(e_bot) + std::abs(e_top) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

double ws_orbit_frequency(const WsPendulum& p, double action, double tol) {
  const double e_top = ws_barrier_top_energy(p);
  const double i_max = ws_action_of_energy(p, e_top, tol);
  double h = 1e-4 * i_max;
  const double lo = std::max(action - h, 0.0);
  const double hi = std::min(action + h, i_max);
  const double e1 = ws_energy_of_action(p, lo, tol);
  const double e2 = ws_energy_of_action(p, hi, tol);
  return (e2 - e1) / (hi - lo);
}

}  // namespace qam
