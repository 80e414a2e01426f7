#include "qam/wavepacket.hpp"

#include <algorithm>
#include <cmath>

#include <fftw3.h>

#include "qam/errors.hpp"

namespace qam {

using cplx = std::complex<double>;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * i / static_cast<double>(std::max(1, n - 1));
  return g;
}

WavepacketState coherent_state_on_grid(const PhaseState& center,
                                       const PlanckSpec& h, int log2_size,
                                       double p_min, double squeeze) {
  const Eigen::Index size = Eigen::Index(1) << log2_size;
  WavepacketState psi;
  psi.hbar = h.hbar;
  psi.dp = h.hbar / static_cast<double>(h.n);
  psi.p0 = p_min;
  psi.amp.resize(size);
  const double sigma2 = h.hbar * squeeze / 2.0;  // sigma_J^2
  const double p_max = p_min + psi.dp * static_cast<double>(size - 1);
  const double pad = 6.0 * std::sqrt(sigma2);
  if (center.action_j - pad < p_min || center.action_j + pad > p_max)
    throw OutOfGrid("coherent_state: center not inside the momentum grid");
  for (Eigen::Index jx = 0; jx < size; ++jx) {
    const double p = psi.momentum(jx);
    const double d = p - center.action_j;
    psi.amp[jx] = std::exp(cplx(-d * d / (4.0 * sigma2), -p * center.theta / h.hbar));
  }
  psi.amp /= std::sqrt(psi.amp.squaredNorm());
  return psi;
}

WavepacketState coherent_state(const PhaseState& center, const PlanckSpec& h,
                               int log2_size, double squeeze) {
  const double dp = h.hbar / static_cast<double>(h.n);
  const double half = dp * static_cast<double>((Eigen::Index(1) << log2_size) / 2);
  return coherent_state_on_grid(center, h, log2_size, center.action_j - half,
                                squeeze);
}

double window_probability(const WavepacketState& psi,
                          std::pair<double, double> j_window) {
  const auto [lo, hi] = j_window;
  double sum = 0.0;
  for (Eigen::Index jx = 0; jx < psi.amp.size(); ++jx) {
    const double p = psi.momentum(jx);
    if (p >= lo && p <= hi) sum += std::norm(psi.amp[jx]);
  }
  return sum;
}

PropagationResult propagate(const WavepacketState& psi0, const MapParams& p,
                            const PlanckSpec& h, long steps,
                            std::pair<double, double> j_window,
                            long snapshot_stride, double boundary_threshold) {
  const Eigen::Index size = psi0.amp.size();
  const double sg = p.sgn();
  const double n_sectors = static_cast<double>(h.n);

  // Phase tables: kinetic in momentum, kick+drift in position. The position
  // period is 2*pi*n for lattice spacing hbar/n, which keeps both factors
  // exactly periodic on the grid.
  Eigen::VectorXcd kin(size), pos(size);
  for (Eigen::Index jx = 0; jx < size; ++jx) {
    const double pj = psi0.momentum(jx);
    kin[jx] = std::exp(cplx(0.0, -sg * pj * pj / (2.0 * h.hbar)));
    const double x = kTwoPi * n_sectors * static_cast<double>(jx) /
                     static_cast<double>(size);
    const double drift_phase = sg * (static_cast<double>(h.m) / n_sectors) * x;
    pos[jx] = std::exp(cplx(0.0, -(p.kick / h.hbar) * std::cos(x) + drift_phase));
  }

  PropagationResult out;
  out.probes.reserve(static_cast<std::size_t>(steps));
  out.final_state = psi0;
  Eigen::VectorXcd& a = out.final_state.amp;

  fftw_plan to_pos = fftw_plan_dft_1d(
      static_cast<int>(size), reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(a.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_plan to_mom = fftw_plan_dft_1d(
      static_cast<int>(size), reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(a.data()), FFTW_FORWARD, FFTW_ESTIMATE);

  const Eigen::Index edge = std::max<Eigen::Index>(1, size / 200);
  const double inv_size = 1.0 / static_cast<double>(size);

  for (long t = 1; t <= steps; ++t) {
    a.array() *= kin.array();
    fftw_execute(to_pos);
    a.array() *= pos.array();
    fftw_execute(to_mom);
    a *= inv_size;

    PropagationProbe probe;
    probe.t = t;
    probe.norm = std::sqrt(a.squaredNorm());
    probe.window_prob = window_probability(out.final_state, j_window);
    out.probes.push_back(probe);

    double boundary = 0.0;
    for (Eigen::Index jx = 0; jx < edge; ++jx)
      boundary += std::norm(a[jx]) + std::norm(a[size - 1 - jx]);
    if (boundary > boundary_threshold) {
      fftw_destroy_plan(to_pos);
      fftw_destroy_plan(to_mom);
      throw GridOverflow("propagate: boundary probability " +
                         std::to_string(boundary) + " at step " +
                         std::to_string(t));
    }
    if (snapshot_stride > 0 && t % snapshot_stride == 0) {
      out.snapshots.push_back(out.final_state);
      out.snapshot_times.push_back(t);
    }
  }
  fftw_destroy_plan(to_pos);
  fftw_destroy_plan(to_mom);
  return out;
}

TailFit fit_exponential_tail(const std::vector<std::pair<double, double>>& series,
                             long t_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (const auto& [t, pt] : series) {
    if (t < static_cast<double>(t_min)) continue;
    if (!(pt > 0))
      throw NonPositiveProbability(
          "fit_exponential_tail: nonpositive probability in the fit window");
    const double y = std::log(pt);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++count;
  }
  if (count < 2)
    throw NonPositiveProbability("fit_exponential_tail: fewer than two points");
  const double nn = static_cast<double>(count);
  const double denom = nn * sxx - sx * sx;
  const double slope = (nn * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / nn;
  double ss = 0;
  for (const auto& [t, pt] : series) {
    if (t < static_cast<double>(t_min)) continue;
    const double r = std::log(pt) - (icept + slope * t);
    ss += r * r;
  }
  return {-slope, std::sqrt(ss / nn)};
}

double HusimiField::cell_area() const {
  const double dth = theta.size() > 1 ? theta[1] - theta[0] : 1.0;
  const double dj = j.size() > 1 ? j[1] - j[0] : 1.0;
  return dth * dj;
}

double HusimiField::integral() const { return value.sum() * cell_area(); }

HusimiField husimi(const WavepacketState& psi, const PlanckSpec& h,
                   const std::vector<double>& theta_grid,
                   const std::vector<double>& j_grid, double squeeze) {
  HusimiField f;
  f.theta = theta_grid;
  f.j = j_grid;
  f.value.setZero(static_cast<Eigen::Index>(theta_grid.size()),
                  static_cast<Eigen::Index>(j_grid.size()));
  const double sigma2 = h.hbar * squeeze / 2.0;
  const double cut = 8.0 * std::sqrt(sigma2);
  const Eigen::Index size = psi.amp.size();

  for (std::size_t ij = 0; ij < j_grid.size(); ++ij) {
    const double j0 = j_grid[ij];
    const Eigen::Index lo = std::max<Eigen::Index>(
        0, static_cast<Eigen::Index>(std::floor((j0 - cut - psi.p0) / psi.dp)));
    const Eigen::Index hi = std::min<Eigen::Index>(
        size - 1,
        static_cast<Eigen::Index>(std::ceil((j0 + cut - psi.p0) / psi.dp)));
    if (hi < lo) continue;
    // Coherent-state envelope on the lattice slice, normalized once per J.
    std::vector<double> env(static_cast<std::size_t>(hi - lo + 1));
    double nrm = 0;
    for (Eigen::Index jx = lo; jx <= hi; ++jx) {
      const double d = psi.momentum(jx) - j0;
      const double e = std::exp(-d * d / (4.0 * sigma2));
      env[static_cast<std::size_t>(jx - lo)] = e;
      nrm += e * e;
    }
    nrm = 1.0 / std::sqrt(nrm);
    for (std::size_t it = 0; it < theta_grid.size(); ++it) {
      const double th = theta_grid[it];
      cplx acc(0, 0);
      for (Eigen::Index jx = lo; jx <= hi; ++jx) {
        const double pj = psi.momentum(jx);
        // conj of coherent amplitude: envelope * exp(+i p theta / hbar)
        const cplx phase = std::exp(cplx(0.0, pj * th / h.hbar));
        acc += env[static_cast<std::size_t>(jx - lo)] * nrm * phase * psi.amp[jx];
      }
      f.value(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(ij)) =
          std::norm(acc) / (kTwoPi * h.hbar);
    }
  }
  return f;
}

WavepacketState state_from_vector(const Eigen::VectorXcd& vec,
                                  const PlanckSpec& h, int nu, double beta) {
  WavepacketState psi;
  psi.amp = vec;
  psi.hbar = h.hbar;
  psi.dp = h.hbar;
  psi.p0 = h.hbar * (beta - static_cast<double>(nu));
  return psi;
}

}  // namespace qam
