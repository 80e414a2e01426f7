#include "qam/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "qam/pendulum.hpp"

namespace qam {

using cplx = std::complex<double>;

namespace {

constexpr std::uint32_t kKindMatrix = 1;
constexpr std::uint32_t kKindSpectrum = 2;

void fill_rates(FloquetSpectrum& s) {
  const double inv2n = 1.0 / (2.0 * s.steps_per_application);
  s.gamma.resize(s.z.size());
  s.quasienergy.resize(s.z.size());
  for (Eigen::Index i = 0; i < s.z.size(); ++i) {
    const double az = std::abs(s.z[i]);
    s.gamma[i] = az > 0 ? std::log(1.0 / az) * inv2n
                        : std::numeric_limits<double>::infinity();
    s.quasienergy[i] = -std::arg(s.z[i]);
  }
}

std::vector<char> pack_spectrum(const FloquetSpectrum& s) {
  ByteWriter w;
  w.put<std::int32_t>(s.nu);
  w.put<std::int32_t>(s.steps_per_application);
  w.put<std::int32_t>(static_cast<std::int32_t>(s.kind));
  w.put<double>(s.rho);
  w.put<double>(s.beta);
  w.put_string(s.source_key);
  w.put_vector(s.z);
  w.put_matrix(s.vectors);
  return w.take();
}

FloquetSpectrum unpack_spectrum(const std::vector<char>& payload) {
  ByteReader r(payload);
  FloquetSpectrum s;
  s.nu = r.get<std::int32_t>();
  s.steps_per_application = r.get<std::int32_t>();
  s.kind = static_cast<OperatorKind>(r.get<std::int32_t>());
  s.rho = r.get<double>();
  s.beta = r.get<double>();
  s.source_key = r.get_string();
  s.z = r.get_cvector();
  s.vectors = r.get_matrix();
  fill_rates(s);
  return s;
}

}  // namespace

FloquetSpectrum eigendecompose(const FloquetMatrix& u) {
  const int n = u.dim();
  Eigen::MatrixXcd a = u.entries;  // zgeev destroys its input
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vr(n, n);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0)
    throw ConvergenceFailure("eigendecompose: zgeev info=" +
                             std::to_string(info) + " for matrix " +
                             Cache::hash_hex(u.cache_key()));
  a.resize(0, 0);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    const double ai = std::abs(w[i]), aj = std::abs(w[j]);
    if (ai != aj) return ai > aj;
    return std::arg(w[i]) < std::arg(w[j]);
  });

  FloquetSpectrum s;
  s.z.resize(n);
  s.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    s.z[i] = w[order[static_cast<std::size_t>(i)]];
    s.vectors.col(i) = vr.col(order[static_cast<std::size_t>(i)]);
  }
  s.nu = u.nu;
  s.steps_per_application = u.steps_per_application;
  s.kind = u.kind;
  s.rho = u.rho;
  s.beta = u.beta_in;
  s.source_key = u.cache_key();
  fill_rates(s);
  return s;
}

FloquetSpectrum cached_eigendecompose(const FloquetMatrix& u,
                                      const Cache* cache) {
  const std::string key = "spectrum|" + u.cache_key();
  if (cache && cache->enabled()) {
    if (auto payload = cache->load(key, kKindSpectrum))
      return unpack_spectrum(*payload);
  }
  FloquetSpectrum s = eigendecompose(u);
  if (cache && cache->enabled()) cache->store(key, kKindSpectrum, pack_spectrum(s));
  return s;
}

void store_matrix(const Cache& cache, const FloquetMatrix& u) {
  ByteWriter w;
  w.put<std::int32_t>(u.nu);
  w.put<std::int32_t>(u.steps_per_application);
  w.put<std::int32_t>(static_cast<std::int32_t>(u.kind));
  w.put<double>(u.rho);
  w.put<double>(u.beta_in);
  w.put<double>(u.beta_out);
  w.put_matrix(u.entries);
  cache.store("matrix|" + u.cache_key(), kKindMatrix, w.take());
}

Eigen::VectorXd decay_rates(const FloquetSpectrum& s) {
  Eigen::VectorXd g(s.z.size());
  const double inv2n = 1.0 / (2.0 * s.steps_per_application);
  for (Eigen::Index i = 0; i < s.z.size(); ++i)
    g[i] = std::log(1.0 / std::abs(s.z[i])) * inv2n;
  return g;
}

namespace {

int nearest_index(const Eigen::VectorXcd& zs, cplx target, double* dist,
                  double* second = nullptr) {
  int best = -1;
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (Eigen::Index i = 0; i < zs.size(); ++i) {
    const double d = std::abs(zs[i] - target);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = static_cast<int>(i);
    } else if (d < d2) {
      d2 = d;
    }
  }
  *dist = d1;
  if (second) *second = d2;
  return best;
}

}  // namespace

std::vector<StabilizedState> match_stabilized(
    const std::vector<FloquetSpectrum>& spectra, double tol) {
  if (spectra.size() < 2)
    throw Error("match_stabilized: need at least two basis sizes");
  std::vector<StabilizedState> out;
  const auto& last = spectra.back();

  // Track each eigenvalue of the smallest basis through the sequence.
  for (Eigen::Index i0 = 0; i0 < spectra.front().z.size(); ++i0) {
    cplx z = spectra.front().z[i0];
    double worst = 0;
    int idx = static_cast<int>(i0);
    bool ok = true;
    for (std::size_t k = 1; k < spectra.size(); ++k) {
      double d;
      idx = nearest_index(spectra[k].z, z, &d);
      worst = std::max(worst, d);
      if (idx < 0 || worst >= tol) {
        ok = false;
        break;
      }
      z = spectra[k].z[idx];
    }
    if (!ok || std::abs(z) >= 1.0 - 1e-12) continue;
    StabilizedState st;
    st.z = z;
    st.gamma = last.gamma[idx];
    st.w = last.quasienergy[idx];
    st.vector = last.vectors.col(idx);
    st.drift_across_nu = worst;
    st.nu = last.nu;
    st.beta = last.beta;
    out.push_back(std::move(st));
  }

  // Two chains may land on the same final eigenvalue; keep the tighter one.
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
    return a.drift_across_nu < b.drift_across_nu;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return a.z == b.z;
                        }),
            out.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
  return out;
}

std::vector<StabilizedState> find_stabilized(const MapParams& p,
                                             const PlanckSpec& h,
                                             const std::vector<int>& nu_seq,
                                             double tol, const Cache* cache) {
  std::vector<int> nus = nu_seq;
  std::sort(nus.begin(), nus.end());
  nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
  std::vector<FloquetSpectrum> spectra;
  spectra.reserve(nus.size());
  for (int nu : nus) {
    const FloquetMatrix u = build_circle_operator(p, h, nu);
    spectra.push_back(cached_eigendecompose(u, cache));
  }
  return match_stabilized(spectra, tol);
}

double state_overlap(const Eigen::VectorXcd& vec, const PlanckSpec& h, int nu,
                     double beta, const WavepacketState& probe) {
  // Accumulate <probe|vec> on coinciding lattice momenta.
  cplx acc(0, 0);
  for (Eigen::Index i = 0; i < vec.size(); ++i) {
    const double pmom = h.hbar * (static_cast<double>(i - nu) + beta);
    const double jx = (pmom - probe.p0) / probe.dp;
    const auto j = static_cast<Eigen::Index>(std::llround(jx));
    if (j < 0 || j >= probe.amp.size()) continue;
    if (std::abs(jx - static_cast<double>(j)) > 1e-9) continue;
    acc += std::conj(probe.amp[j]) * vec[i];
  }
  return std::norm(acc);
}

const StabilizedState& select_by_overlap(
    const std::vector<StabilizedState>& states, const WavepacketState& probe) {
  if (states.empty())
    throw EmptyCandidates("select_by_overlap: no stabilized states");
  const StabilizedState* best = nullptr;
  double best_ov = -1;
  PlanckSpec h;
  for (const auto& st : states) {
    h.hbar = probe.hbar;
    const double ov = state_overlap(st.vector, h, st.nu, st.beta, probe);
    if (ov > best_ov + 1e-15 ||
        (std::abs(ov - best_ov) <= 1e-15 && best && st.gamma < best->gamma)) {
      best_ov = ov;
      best = &st;
    }
  }
  return *best;
}

IslandBox island_bounding_box(const MapParams& p) {
  const WsPendulum pend{p.drift, p.kick};
  const auto sep = ws_separatrix(pend);
  // Pendulum angle = map angle + pi on the minus branch, identical on plus.
  const double offset = p.sign == MapSign::minus ? -kPi : 0.0;
  const auto [lo, hi] = sep.turning_points;
  IslandBox box;
  box.theta_center = wrap_angle(0.5 * (lo + hi) + offset);
  box.theta_halfwidth = 0.5 * (hi - lo);
  box.j_center = 0.0;
  box.j_halfwidth = sep.j_max;
  return box;
}

double island_overlap_of(const Eigen::VectorXcd& vec, const PlanckSpec& h,
                         int nu, double beta, const IslandBox& box) {
  const WavepacketState st = state_from_vector(vec, h, nu, beta);
  const int nth = 48, nj = 48;
  const double j_span = std::max(box.j_halfwidth + 0.5, kPi);
  const auto theta_grid = linspace(0.0, kTwoPi * (1.0 - 1.0 / nth), nth);
  const auto j_grid =
      linspace(box.j_center - j_span, box.j_center + j_span, nj);
  const HusimiField f = husimi(st, h, theta_grid, j_grid);
  double inside = 0;
  for (int it = 0; it < nth; ++it) {
    const bool th_in = std::abs(wrap_centered(theta_grid[it] - box.theta_center)) <=
                       box.theta_halfwidth;
    if (!th_in) continue;
    for (int ij = 0; ij < nj; ++ij) {
      if (std::abs(j_grid[ij] - box.j_center) <= box.j_halfwidth)
        inside += f.value(it, ij);
    }
  }
  return inside * f.cell_area();
}

RhoScan scan_rho(const MapParams& p, const PlanckSpec& h,
                 const std::vector<double>& rho_list, int nu, double tol,
                 const Cache* cache, double entry_limit) {
  const double inv = 1.0 / h.hbar;
  if (h.n != 1 || std::abs(inv - std::round(inv)) > 1e-9)
    throw UnsupportedPlanck("scan_rho: requires hbar = 1/integer");
  std::vector<double> rhos = rho_list;
  std::sort(rhos.begin(), rhos.end());

  RhoScan scan;
  for (double rho : rhos) {
    FloquetMatrix u = build_complex_scaled(p, h, rho, nu);
    const double peak = max_abs_entry(u);
    if (!(peak < entry_limit)) {
      std::ostringstream os;
      os << "rho=" << rho << " skipped: max |entry| = " << peak;
      scan.skipped.push_back(os.str());
      continue;
    }
    scan.spectra.push_back(cached_eigendecompose(u, cache));
    scan.rho_used.push_back(rho);
  }
  if (scan.spectra.size() >= 2)
    scan.stable = match_stabilized(scan.spectra, tol);
  return scan;
}

namespace {

std::vector<StabilizedState> with_island_overlaps(
    std::vector<StabilizedState> states, const PlanckSpec& h,
    const IslandBox& box) {
  for (auto& st : states)
    st.island_overlap = island_overlap_of(st.vector, h, st.nu, st.beta, box);
  return states;
}

const StabilizedState* pick_state(const std::vector<StabilizedState>& states,
                                  Selection sel, double overlap_threshold,
                                  const WavepacketState* probe,
                                  const PlanckSpec& h) {
  if (states.empty()) return nullptr;
  if (sel == Selection::max_overlap && probe) {
    const StabilizedState* best = nullptr;
    double best_ov = -1;
    for (const auto& st : states) {
      const double ov = state_overlap(st.vector, h, st.nu, st.beta, *probe);
      if (ov > best_ov) {
        best_ov = ov;
        best = &st;
      }
    }
    return best;
  }
  // minimal decay rate among island-supported states
  const StabilizedState* best = nullptr;
  for (const auto& st : states) {
    if (st.island_overlap < overlap_threshold) continue;
    if (st.gamma <= 0) continue;
    if (!best || st.gamma < best->gamma) best = &st;
  }
  return best;
}

void note_error(const SweepOptions& opts, double inv_hbar,
                const std::string& what) {
  if (opts.point_errors) {
    std::ostringstream os;
    os << "inv_hbar=" << inv_hbar << ": " << what;
    opts.point_errors->push_back(os.str());
  }
}

}  // namespace

std::vector<StabilizedState> stabilized_island_states(
    const MapParams& p, const PlanckSpec& h, const std::vector<int>& nu_seq,
    double stab_tol, const IslandBox& box, const Cache* cache) {
  return with_island_overlaps(find_stabilized(p, h, nu_seq, stab_tol, cache),
                              h, box);
}

DecayCurve sweep_decay(const MapParams& p,
                       const std::vector<double>& inv_hbar_grid,
                       SweepMethod method, const SweepOptions& opts) {
  DecayCurve curve;
  const IslandBox box = island_bounding_box(p);
  const PhaseState center = find_fixed_point(p).state;

  for (double inv_hbar : inv_hbar_grid) {
    PlanckSpec h;
    try {
      h = commensurate(p.drift, 1.0 / inv_hbar, opts.n_max, opts.snap_bound,
                       opts.beta);
    } catch (const Error& e) {
      note_error(opts, inv_hbar, e.what());
      continue;
    }
    DecayPoint row;
    row.inv_hbar_requested = inv_hbar;
    row.inv_hbar_snapped = 1.0 / h.hbar;
    row.m = h.m;
    row.n = h.n;
    row.w = std::numeric_limits<double>::quiet_NaN();

    try {
      if (method == SweepMethod::truncated) {
        auto states = stabilized_island_states(p, h, opts.nu_seq, opts.stab_tol,
                                               box, opts.cache);
        std::unique_ptr<WavepacketState> probe;
        if (opts.selection == Selection::max_overlap)
          probe = std::make_unique<WavepacketState>(
              coherent_state(center, h, 12, opts.wp_squeeze));
        const StabilizedState* st = pick_state(
            states, opts.selection, opts.overlap_threshold, probe.get(), h);
        if (!st) {
          note_error(opts, inv_hbar, "no stabilized island state");
          continue;
        }
        row.gamma = st->gamma;
        row.w = st->w;
        row.nu_or_rho = st->nu;
        row.overlap = st->island_overlap;
        row.method = "truncated";
      } else if (method == SweepMethod::complex_scaling) {
        const int nu = opts.nu_seq.empty() ? 512 : opts.nu_seq.back();
        RhoScan scan = scan_rho(p, h, opts.rho_list, nu, opts.stab_tol,
                                opts.cache);
        auto states = with_island_overlaps(std::move(scan.stable), h, box);
        const StabilizedState* st = pick_state(
            states, Selection::min_island_rate, opts.overlap_threshold,
            nullptr, h);
        if (!st) {
          note_error(opts, inv_hbar, "no rho-stable island state");
          continue;
        }
        row.gamma = st->gamma;
        row.w = st->w;
        row.nu_or_rho = scan.rho_used.empty() ? 0.0 : scan.rho_used.back();
        row.overlap = st->island_overlap;
        row.method = "complex_scaling";
      } else {
        const WavepacketState psi0 =
            coherent_state(center, h, opts.wp_log2, opts.wp_squeeze);
        const std::pair<double, double> window{box.j_center - kPi,
                                               box.j_center + kPi};
        const auto run = propagate(psi0, p, h, opts.wp_steps, window);
        std::vector<std::pair<double, double>> series;
        series.reserve(run.probes.size());
        for (const auto& pr : run.probes)
          series.emplace_back(static_cast<double>(pr.t), pr.window_prob);
        const long tmin = opts.wp_tmin > 0 ? opts.wp_tmin : opts.wp_steps / 4;
        const TailFit fit = fit_exponential_tail(series, tmin);
        // Probability rate -> spectral convention ln(1/|z|)/(2n).
        row.gamma = fit.rate / 4.0;
        row.nu_or_rho = opts.wp_log2;
        row.overlap = window_probability(psi0, window);
        row.method = "wavepacket";
        if (!(row.gamma > 0)) {
          note_error(opts, inv_hbar, "nonpositive fitted rate");
          continue;
        }
      }
    } catch (const Error& e) {
      note_error(opts, inv_hbar, e.what());
      continue;
    }
    curve.rows.push_back(std::move(row));
  }
  curve.canonicalize();
  return curve;
}

BranchSet track_crossing(
    const std::vector<double>& inv_hbar,
    const std::vector<std::vector<std::pair<double, double>>>& states_per_point,
    double guard_ratio) {
  if (inv_hbar.size() != states_per_point.size())
    throw Error("track_crossing: grid/state size mismatch");
  const int npts = static_cast<int>(inv_hbar.size());

  BranchSet set;
  std::vector<int> branch_index_at;  // per live branch: index into set.branches
  std::vector<std::pair<double, double>> branch_last;

  auto dist = [](const std::pair<double, double>& a,
                 const std::pair<double, double>& b) {
    return std::hypot(a.first - b.first, wrap_centered(a.second - b.second));
  };

  for (int k = 0; k < npts; ++k) {
    const auto& states = states_per_point[static_cast<std::size_t>(k)];
    std::vector<int> claim(states.size(), -1);  // winning live-branch slot
    std::vector<double> claim_d(states.size(),
                                std::numeric_limits<double>::infinity());

    for (std::size_t b = 0; b < branch_last.size(); ++b) {
      double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
      int best = -1;
      for (std::size_t s = 0; s < states.size(); ++s) {
        const double d = dist(branch_last[b], states[s]);
        if (d < d1) {
          d2 = d1;
          d1 = d;
          best = static_cast<int>(s);
        } else if (d < d2) {
          d2 = d;
        }
      }
      if (best < 0) continue;
      if (states.size() > 1 && d2 < guard_ratio * d1) continue;  // ambiguous
      if (d1 < claim_d[static_cast<std::size_t>(best)]) {
        claim_d[static_cast<std::size_t>(best)] = d1;
        claim[static_cast<std::size_t>(best)] = static_cast<int>(b);
      }
    }

    std::vector<int> next_index;
    std::vector<std::pair<double, double>> next_last;
    for (std::size_t s = 0; s < states.size(); ++s) {
      int slot;
      if (claim[s] >= 0) {
        slot = branch_index_at[static_cast<std::size_t>(claim[s])];
      } else {
        set.branches.emplace_back();
        slot = static_cast<int>(set.branches.size()) - 1;
      }
      set.branches[static_cast<std::size_t>(slot)].push_back(
          {inv_hbar[static_cast<std::size_t>(k)], states[s].first,
           states[s].second});
      next_index.push_back(slot);
      next_last.push_back(states[s]);
    }
    branch_index_at = std::move(next_index);
    branch_last = std::move(next_last);
  }

  // Avoided-crossing markers: strict local minima of the inter-branch
  // distance over sweep indices where both branches have points.
  const auto at_inv = [&](const std::vector<BranchPoint>& br,
                          double x) -> const BranchPoint* {
    for (const auto& pt : br)
      if (pt.inv_hbar == x) return &pt;
    return nullptr;
  };
  for (std::size_t a = 0; a < set.branches.size(); ++a) {
    for (std::size_t b = a + 1; b < set.branches.size(); ++b) {
      std::vector<std::pair<double, double>> d;  // (inv_hbar, distance)
      for (int k = 0; k < npts; ++k) {
        const double x = inv_hbar[static_cast<std::size_t>(k)];
        const BranchPoint* pa = at_inv(set.branches[a], x);
        const BranchPoint* pb = at_inv(set.branches[b], x);
        if (pa && pb)
          d.emplace_back(x, dist({pa->gamma, pa->w}, {pb->gamma, pb->w}));
      }
      for (std::size_t k = 1; k + 1 < d.size(); ++k) {
        if (d[k].second < d[k - 1].second && d[k].second < d[k + 1].second)
          set.crossings.push_back({d[k].first, static_cast<int>(a),
                                   static_cast<int>(b), d[k].second});
      }
    }
  }
  std::sort(set.crossings.begin(), set.crossings.end(),
            [](const CrossingMarker& x, const CrossingMarker& y) {
              return x.inv_hbar < y.inv_hbar;
            });
  return set;
}

}  // namespace qam
