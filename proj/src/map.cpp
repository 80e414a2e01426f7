#include "qam/map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_set>

namespace qam {

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  // fmod can return exactly 2pi after the correction when theta is a tiny
  // negative number; fold that back.
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double wrap_centered(double x) {
  double t = std::fmod(x + kPi, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t - kPi;
}

PhaseState map_step(const PhaseState& s, const MapParams& p) {
  const double sg = p.sgn();
  PhaseState out;
  out.theta = wrap_angle(s.theta + sg * s.action_j);
  out.action_j = s.action_j + p.kick * std::sin(out.theta) + sg * p.drift;
  return out;
}

std::vector<PhaseState> iterate_map(const PhaseState& s0, const MapParams& p,
                                    long steps) {
  std::vector<PhaseState> orbit;
  orbit.reserve(static_cast<std::size_t>(steps) + 1);
  orbit.push_back(s0);
  PhaseState s = s0;
  for (long t = 0; t < steps; ++t) {
    s = map_step(s, p);
    orbit.push_back(s);
  }
  return orbit;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Mat2 tangent_step(const PhaseState& s, const MapParams& p) {
  const double sg = p.sgn();
  const double kc = p.kick * std::cos(wrap_angle(s.theta + sg * s.action_j));
  return {1.0, sg, kc, 1.0 + sg * kc};
}

FixedPointResult find_fixed_point(const MapParams& p) {
  if (p.kick < p.drift)
    throw NoFixedPoint("find_fixed_point: kick < drift, no period-1 point");
  // kick*sin(theta*) = -sgn*drift, J* = 0
  const double sg = p.sgn();
  const double s = p.kick > 0 ? -sg * p.drift / p.kick : 0.0;
  const double t0 = std::asin(std::clamp(s, -1.0, 1.0));
  const std::array<double, 2> candidates = {wrap_angle(t0),
                                            wrap_angle(kPi - t0)};
  FixedPointResult best;
  bool have = false;
  for (double th : candidates) {
    const double trace = 2.0 + sg * p.kick * std::cos(th);
    const bool stable = std::abs(trace) < 2.0;
    if (!have || (stable && !best.stable) ||
        (stable == best.stable && std::abs(trace) < std::abs(best.trace))) {
      best = {{th, 0.0}, trace, stable};
      have = true;
    }
  }
  return best;
}

std::vector<PortraitPoint> phase_portrait(const MapParams& p,
                                          const std::vector<PhaseState>& seeds,
                                          long steps) {
  std::vector<PortraitPoint> cloud;
  cloud.reserve(seeds.size() * static_cast<std::size_t>(steps + 1));
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    PhaseState s = seeds[k];
    for (long t = 0; t <= steps; ++t) {
      cloud.push_back({s.theta, wrap_centered(s.action_j), static_cast<int>(k)});
      s = map_step(s, p);
    }
  }
  return cloud;
}

bool orbit_bounded(const MapParams& p, const PhaseState& seed, double j_center,
                   long horizon) {
  PhaseState s = seed;
  for (long t = 0; t < horizon; ++t) {
    s = map_step(s, p);
    if (std::abs(s.action_j - j_center) > kPi) return false;
  }
  return true;
}

double island_area(const MapParams& p, const PhaseState& center,
                   double grid_step, long escape_horizon) {
  if (!orbit_bounded(p, center, center.action_j, escape_horizon))
    throw NotInIsland("island_area: center orbit escapes the J window");

  // Cells indexed over one torus cell around the center; flood fill with the
  // bounded-orbit membership test.
  const long nth = std::max<long>(1, std::lround(kTwoPi / grid_step));
  const long nj = nth;
  const double dth = kTwoPi / static_cast<double>(nth);
  const double dj = kTwoPi / static_cast<double>(nj);
  const double j_lo = center.action_j - kPi;

  auto cell_id = [&](long i, long j) { return i * nj + j; };
  const long ic = std::min<long>(nth - 1, std::lround(std::floor(center.theta / dth)));
  const long jc = std::min<long>(nj - 1, std::lround(std::floor((center.action_j - j_lo) / dj)));

  std::unordered_set<std::int64_t> visited, inside;
  std::deque<std::pair<long, long>> frontier;
  frontier.emplace_back(ic, jc);
  visited.insert(cell_id(ic, jc));

  while (!frontier.empty()) {
    auto [i, j] = frontier.front();
    frontier.pop_front();
    const PhaseState probe{(static_cast<double>(i) + 0.5) * dth,
                           j_lo + (static_cast<double>(j) + 0.5) * dj};
    if (!orbit_bounded(p, probe, center.action_j, escape_horizon)) continue;
    inside.insert(cell_id(i, j));
    const std::array<std::pair<long, long>, 4> nb = {
        std::pair<long, long>{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (auto [ni, njj] : nb) {
      const long wi = (ni % nth + nth) % nth;  // theta is periodic
      if (njj < 0 || njj >= nj) continue;      // J window is not
      if (visited.insert(cell_id(wi, njj)).second) frontier.emplace_back(wi, njj);
    }
  }
  return static_cast<double>(inside.size()) * dth * dj;
}

double orbit_enclosed_area(const MapParams& p, const PhaseState& seed,
                           const PhaseState& center, long n_points) {
  std::vector<std::pair<double, std::pair<double, double>>> pts;
  pts.reserve(static_cast<std::size_t>(n_points));
  PhaseState s = seed;
  for (long t = 0; t < n_points; ++t) {
    const double x = wrap_centered(s.theta - center.theta);
    const double y = s.action_j - center.action_j;
    pts.push_back({std::atan2(y, x), {x, y}});
    s = map_step(s, p);
  }
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double area2 = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& [xa, ya] = pts[k].second;
    const auto& [xb, yb] = pts[(k + 1) % pts.size()].second;
    area2 += xa * yb - xb * ya;
  }
  return 0.5 * std::abs(area2);
}

namespace {

// r-step map and its tangent product, on the torus.
struct RStep {
  double dth, dj;  // wrapped closure residuals
  Mat2 m;
};

RStep r_step(const MapParams& p, const PhaseState& s0, int r) {
  PhaseState s = s0;
  Mat2 m;
  for (int t = 0; t < r; ++t) {
    m = tangent_step(s, p) * m;
    s = map_step(s, p);
  }
  return {wrap_centered(s.theta - s0.theta), wrap_centered(s.action_j - s0.action_j), m};
}

}  // namespace

PeriodicOrbit find_periodic_orbit(const MapParams& p, const PhaseState& seed,
                                  int period, double tol, int max_iter) {
  PhaseState x = seed;
  double res = 0;
  for (int it = 0; it < max_iter; ++it) {
    const RStep f = r_step(p, x, period);
    res = std::hypot(f.dth, f.dj);
    if (res < tol) return {x, period, res};
    // Newton step on F(x) = map^r(x) - x with Jacobian M - I.
    Mat2 j{f.m.a11 - 1.0, f.m.a12, f.m.a21, f.m.a22 - 1.0};
    double det = j.det();
    if (std::abs(det) < 1e-12) {
      j.a11 += 1e-9;
      j.a22 += 1e-9;
      det = j.det();
    }
    const double ddth = (j.a22 * f.dth - j.a12 * f.dj) / det;
    const double ddj = (-j.a21 * f.dth + j.a11 * f.dj) / det;
    // Damped update: backtrack until the residual does not grow.
    double lambda = 1.0;
    for (int back = 0; back < 40; ++back) {
      PhaseState trial{wrap_angle(x.theta - lambda * ddth),
                       x.action_j - lambda * ddj};
      const RStep g = r_step(p, trial, period);
      if (std::hypot(g.dth, g.dj) < res || lambda < 1e-8) {
        x = trial;
        break;
      }
      lambda *= 0.5;
    }
  }
  const RStep f = r_step(p, x, period);
  res = std::hypot(f.dth, f.dj);
  if (res < tol) return {x, period, res};
  throw NotPeriodic("find_periodic_orbit: no convergence from seed");
}

double monodromy_trace(const MapParams& p, const PhaseState& orbit_point,
                       int period, double closure_tol) {
  const RStep f = r_step(p, orbit_point, period);
  if (std::hypot(f.dth, f.dj) > closure_tol)
    throw NotPeriodic("monodromy_trace: point is not period-r to tolerance");
  return f.m.trace();
}

}  // namespace qam
