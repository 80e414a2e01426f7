#pragma once

#include <cmath>
#include <utility>

#include "qam/errors.hpp"

namespace qam {

// Adaptive Gauss-Kronrod 7/15 quadrature. The turning-point integrands of the
// pendulum module vanish like sqrt(x - a) at interval ends; integrate_sqrt_endpoints
// removes that with the substitution theta = mid - half*cos(phi) before adapting.

namespace detail {

// G7/K15 nodes and weights on [-1, 1] (symmetric; positive half listed).
inline constexpr double kKronrodNodes[8] = {
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
inline constexpr double kKronrodWeights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
inline constexpr double kGaussWeights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  fv[7] = f(mid);
  for (int i = 1; i < 8; ++i) {
    fv[7 - i] = f(mid - half * kKronrodNodes[i]);
    fv[7 + i] = f(mid + half * kKronrodNodes[i]);
  }
  double kron = kKronrodWeights[0] * fv[7];
  for (int i = 1; i < 8; ++i)
    kron += kKronrodWeights[i] * (fv[7 - i] + fv[7 + i]);
  double gauss = kGaussWeights[0] * fv[7];
  for (int i = 1; i < 4; ++i)
    gauss += kGaussWeights[i] * (fv[7 - 2 * i] + fv[7 + 2 * i]);
  kron *= half;
  gauss *= half;
  return {kron, std::abs(kron - gauss)};
}

template <class F>
double adapt(const F& f, double a, double b, double tol, int depth) {
  auto [val, err] = gk15(f, a, b);
  if (err <= tol || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1.0))
    return val;
  if (depth <= 0)
    throw QuadratureFailure("adaptive quadrature: subdivision limit reached");
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth - 1) +
         adapt(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-9,
                          int max_depth = 48) {
  if (a == b) return 0.0;
  return detail::adapt(f, a, b, tol, max_depth);
}

/// Integrates f over [a, b] where f vanishes like sqrt(distance) at one or
/// both endpoints (classical turning points).
template <class F>
double integrate_sqrt_endpoints(const F& f, double a, double b,
                                double tol = 1e-9) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double phi) {
    const double theta = mid - half * std::cos(phi);
    return f(theta) * half * std::sin(phi);
  };
  constexpr double kPi = 3.141592653589793238462643383279503;
  return integrate_adaptive(g, 0.0, kPi, tol);
}

}  // namespace qam
