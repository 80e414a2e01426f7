#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qam/cache.hpp"
#include "qam/curve.hpp"
#include "qam/floquet.hpp"
#include "qam/wavepacket.hpp"

namespace qam {

/// Full non-normal eigendecomposition with per-kick decay rates
/// Gamma_j = ln(1/|z_j|)/(2n). Eigenpairs are canonically sorted by
/// descending |z|, then ascending arg(z).
struct FloquetSpectrum {
  Eigen::VectorXcd z;
  Eigen::MatrixXcd vectors;     // right eigenvectors, by column
  Eigen::VectorXd gamma;
  Eigen::VectorXd quasienergy;  // w = -arg(z), in (-pi, pi]
  int nu = 0;
  int steps_per_application = 1;
  OperatorKind kind = OperatorKind::unitary;
  double rho = 1.0;
  double beta = 0.0;
  std::string source_key;
};

FloquetSpectrum eigendecompose(const FloquetMatrix& u);

/// eigendecompose with a spectrum cache in front (hit on params-hash key).
FloquetSpectrum cached_eigendecompose(const FloquetMatrix& u,
                                      const Cache* cache);

/// Writes the matrix itself to the cache (documented binary layout).
void store_matrix(const Cache& cache, const FloquetMatrix& u);

Eigen::VectorXd decay_rates(const FloquetSpectrum& s);

struct StabilizedState {
  std::complex<double> z;
  double gamma = 0;
  double w = 0;
  Eigen::VectorXcd vector;  // from the largest basis tested
  double drift_across_nu = 0;
  double island_overlap = -1;
  int nu = 0;
  double beta = 0;
};

/// Matches eigenvalues across spectra of increasing basis size by nearest
/// neighbor in the complex plane; keeps chains whose largest jump stays
/// below tol and whose final |z| < 1 - 1e-12.
std::vector<StabilizedState> match_stabilized(
    const std::vector<FloquetSpectrum>& spectra, double tol);

/// Builds (or loads) the circle operator spectra for each nu and matches.
std::vector<StabilizedState> find_stabilized(const MapParams& p,
                                             const PlanckSpec& h,
                                             const std::vector<int>& nu_seq,
                                             double tol,
                                             const Cache* cache = nullptr);

const StabilizedState& select_by_overlap(
    const std::vector<StabilizedState>& states, const WavepacketState& probe);

double state_overlap(const Eigen::VectorXcd& vec, const PlanckSpec& h, int nu,
                     double beta, const WavepacketState& probe);

struct RhoScan {
  std::vector<FloquetSpectrum> spectra;  // one per usable rho, ascending
  std::vector<double> rho_used;
  std::vector<StabilizedState> stable;   // rho-independent subset
  std::vector<std::string> skipped;      // rho values dropped by the monitor
};

/// Complex-scaling scan; requires hbar = 1/integer (n = 1). Scaled matrices
/// whose largest entry exceeds entry_limit are skipped.
RhoScan scan_rho(const MapParams& p, const PlanckSpec& h,
                 const std::vector<double>& rho_list, int nu, double tol,
                 const Cache* cache = nullptr, double entry_limit = 1e12);

/// Phase-space box used to classify island states (theta measured around the
/// island center with periodic wrap).
struct IslandBox {
  double theta_center = 0;
  double theta_halfwidth = kPi;
  double j_center = 0;
  double j_halfwidth = kPi;
};

/// Box around the classical island from the WS separatrix, in map coordinates.
IslandBox island_bounding_box(const MapParams& p);

/// Husimi mass of the (normalized) eigenvector inside the box.
double island_overlap_of(const Eigen::VectorXcd& vec, const PlanckSpec& h,
                         int nu, double beta, const IslandBox& box);

/// find_stabilized + island overlaps attached.
std::vector<StabilizedState> stabilized_island_states(
    const MapParams& p, const PlanckSpec& h, const std::vector<int>& nu_seq,
    double stab_tol, const IslandBox& box, const Cache* cache = nullptr);

enum class SweepMethod { truncated, complex_scaling, wavepacket };
enum class Selection { min_island_rate, max_overlap };

struct SweepOptions {
  std::vector<int> nu_seq = {512, 1024};
  std::vector<double> rho_list = {0.90, 0.92, 0.94, 0.96, 0.98};
  Selection selection = Selection::min_island_rate;
  double stab_tol = 1e-6;
  long n_max = 16;
  double snap_bound = 1e-3;
  double beta = 0.0;
  double overlap_threshold = 0.5;
  int wp_log2 = 14;
  long wp_steps = 2000;
  long wp_tmin = -1;  // default: steps/4
  double wp_squeeze = 1.0;
  const Cache* cache = nullptr;
  std::vector<std::string>* point_errors = nullptr;  // sidecar, not fatal
};

/// Decay curve over a 1/hbar grid; each point snapped via commensurate().
/// The wavepacket fit rate (a probability rate) is converted to the spectral
/// convention Gamma = ln(1/|z|)/(2n), i.e. divided by 4.
DecayCurve sweep_decay(const MapParams& p,
                       const std::vector<double>& inv_hbar_grid,
                       SweepMethod method, const SweepOptions& opts);

struct BranchPoint {
  double inv_hbar;
  double gamma;
  double w;
};

struct CrossingMarker {
  double inv_hbar;
  int branch_a;
  int branch_b;
  double distance;
};

struct BranchSet {
  std::vector<std::vector<BranchPoint>> branches;
  std::vector<CrossingMarker> crossings;
};

/// Continues (Gamma, w) branches across the sweep by nearest-neighbor
/// matching with a second-nearest guard ratio, and marks local minima of the
/// inter-branch distance as avoided crossings.
BranchSet track_crossing(
    const std::vector<double>& inv_hbar,
    const std::vector<std::vector<std::pair<double, double>>>& states_per_point,
    double guard_ratio = 3.0);

}  // namespace qam
