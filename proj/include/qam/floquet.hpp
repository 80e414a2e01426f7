#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qam/map.hpp"
#include "qam/planck.hpp"

namespace qam {

enum class OperatorKind { unitary, truncated, complex_scaled };

/// Dense matrix of a (one-step, composite, truncated or complex-scaled)
/// evolution operator over momentum states l = -nu..nu of one quasimomentum
/// sector. Row/column index i corresponds to l = i - nu.
struct FloquetMatrix {
  Eigen::MatrixXcd entries;
  int nu = 0;
  int steps_per_application = 1;  // n of the composite circle operator
  OperatorKind kind = OperatorKind::unitary;
  double rho = 1.0;
  double beta_in = 0.0;
  double beta_out = 0.0;
  MapParams params;
  PlanckSpec planck;

  int dim() const { return 2 * nu + 1; }
  std::string cache_key() const;
};

enum class KickAssembly { automatic, bessel, fft };

/// Toeplitz coefficients c_d = (-i)^d J_d(kappa), d = 0..max_order, of the
/// kick factor exp(-i*kappa*cos(theta)); c_{-d} = c_d.
Eigen::VectorXcd kick_coefficients(double kappa, int max_order,
                                   KickAssembly how = KickAssembly::automatic);

/// One-step operator at quasimomentum sector beta_in:
/// drift shift * kick * kinetic, with the branch sign carried by the kinetic
/// phase sign and the drift direction.
FloquetMatrix build_one_step(const MapParams& p, const PlanckSpec& h,
                             double beta_in, int nu,
                             KickAssembly how = KickAssembly::automatic);

/// Composite of n one-step operators following the quasimomentum sector chain
/// beta, beta +- m/n, ...; the result maps sector beta to itself.
FloquetMatrix build_circle_operator(const MapParams& p, const PlanckSpec& h,
                                    int nu,
                                    KickAssembly how = KickAssembly::automatic);

/// Central (2*nu_new+1)-square block.
FloquetMatrix truncate(const FloquetMatrix& u, int nu_new);

/// Similarity-scaled operator exposing resonances: entries scaled by
/// rho^(+-(l'-l)) with the sign adapted to the branch's escape direction.
/// Requires hbar = 1/integer and n = 1. rho in (0, 1].
FloquetMatrix build_complex_scaled(const MapParams& p, const PlanckSpec& h,
                                   double rho, int nu,
                                   KickAssembly how = KickAssembly::automatic);

double max_abs_entry(const FloquetMatrix& u);

/// C = A * B through BLAS.
Eigen::MatrixXcd gemm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

std::string map_key(const MapParams& p);

}  // namespace qam
