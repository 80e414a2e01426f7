#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qam/map.hpp"
#include "qam/planck.hpp"

namespace qam {

/// State on a uniform momentum lattice p_j = p0 + j*dp covering the line;
/// dp = hbar/n so the drift is an exact lattice shift.
struct WavepacketState {
  Eigen::VectorXcd amp;
  double p0 = 0.0;
  double dp = 1.0;
  double hbar = 1.0;

  double momentum(Eigen::Index j) const { return p0 + dp * static_cast<double>(j); }
  double norm2() const { return amp.squaredNorm(); }
};

/// Normalized Gaussian in momentum with widths dtheta*dJ = hbar/2 and aspect
/// ratio `squeeze` (sigma_J^2 = hbar*squeeze/2), centered on `center`, on a
/// 2^log2_size lattice centered at the island momentum.
WavepacketState coherent_state(const PhaseState& center, const PlanckSpec& h,
                               int log2_size, double squeeze = 1.0);

/// Same, with an explicit lowest lattice momentum.
WavepacketState coherent_state_on_grid(const PhaseState& center,
                                       const PlanckSpec& h, int log2_size,
                                       double p_min, double squeeze = 1.0);

double window_probability(const WavepacketState& psi,
                          std::pair<double, double> j_window);

struct PropagationProbe {
  long t;
  double norm;
  double window_prob;
};

struct PropagationResult {
  std::vector<PropagationProbe> probes;       // one per step, t = 1..steps
  WavepacketState final_state;
  std::vector<WavepacketState> snapshots;     // every snapshot_stride steps
  std::vector<long> snapshot_times;
};

/// Split-step FFT propagation on the line (fully unitary). Throws
/// GridOverflow if the probability within the outer 0.5% of the lattice
/// exceeds boundary_threshold at any probe.
PropagationResult propagate(const WavepacketState& psi0, const MapParams& p,
                            const PlanckSpec& h, long steps,
                            std::pair<double, double> j_window,
                            long snapshot_stride = 0,
                            double boundary_threshold = 1e-8);

struct TailFit {
  double rate;      // -slope of ln p_t
  double residual;  // rms of the fit residuals
};

/// Least-squares exponential fit of (t, p_t) for t >= t_min.
TailFit fit_exponential_tail(const std::vector<std::pair<double, double>>& series,
                             long t_min);

struct HusimiField {
  std::vector<double> theta;
  std::vector<double> j;
  Eigen::MatrixXd value;  // value(i_theta, i_j) >= 0

  double cell_area() const;
  double integral() const;  // sum * cell_area
};

/// Squared overlaps with a coherent-state grid, scaled by 1/(2 pi hbar) so a
/// normalized state integrates to ~1 on an enclosing grid.
HusimiField husimi(const WavepacketState& psi, const PlanckSpec& h,
                   const std::vector<double>& theta_grid,
                   const std::vector<double>& j_grid, double squeeze = 1.0);

/// Wraps a Floquet eigenvector (momentum indices -nu..nu at sector beta) as a
/// lattice state so it can be fed to husimi / overlaps.
WavepacketState state_from_vector(const Eigen::VectorXcd& vec,
                                  const PlanckSpec& h, int nu, double beta);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace qam
