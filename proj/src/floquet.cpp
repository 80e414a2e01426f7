#include "qam/floquet.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <fftw3.h>
#include <gsl/gsl_sf_bessel.h>

namespace qam {

using cplx = std::complex<double>;

namespace {

constexpr cplx kMinusIPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // (-i)^d

cplx minus_i_pow(long d) {
  return kMinusIPow[((d % 4) + 4) % 4];
}

Eigen::VectorXcd coeffs_bessel(double kappa, int max_order) {
  std::vector<double> j(static_cast<std::size_t>(max_order) + 1);
  gsl_sf_bessel_Jn_array(0, max_order, kappa, j.data());
  Eigen::VectorXcd c(max_order + 1);
  for (int d = 0; d <= max_order; ++d) c[d] = minus_i_pow(d) * j[d];
  return c;
}

Eigen::VectorXcd coeffs_fft(double kappa, int max_order) {
  int m = 8;
  while (m < 4 * (max_order + 1)) m *= 2;
  std::vector<cplx> buf(static_cast<std::size_t>(m));
  for (int g = 0; g < m; ++g) {
    const double theta = kTwoPi * g / static_cast<double>(m);
    buf[g] = std::exp(cplx(0.0, -kappa * std::cos(theta)));
  }
  fftw_plan plan = fftw_plan_dft_1d(
      m, reinterpret_cast<fftw_complex*>(buf.data()),
      reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Eigen::VectorXcd c(max_order + 1);
  for (int d = 0; d <= max_order; ++d) c[d] = buf[d] / static_cast<double>(m);
  return c;
}

// Sector arithmetic for the drift factor: (l + beta) -> (l + beta) + sg*m/n.
struct DriftShift {
  long q;           // integer index shift
  double beta_out;  // outgoing sector in [0, 1)
};

DriftShift drift_shift(const MapParams& p, const PlanckSpec& h, double beta_in) {
  const double step = p.sgn() * static_cast<double>(h.m) / h.n;
  const double out = beta_in + step;
  double beta_out = out - std::floor(out);
  if (beta_out >= 1.0) beta_out -= 1.0;
  return {std::lround(out - beta_out), beta_out};
}

}  // namespace

Eigen::VectorXcd kick_coefficients(double kappa, int max_order,
                                   KickAssembly how) {
  if (how == KickAssembly::bessel) return coeffs_bessel(kappa, max_order);
  if (how == KickAssembly::fft) return coeffs_fft(kappa, max_order);
  return max_order <= 1024 ? coeffs_bessel(kappa, max_order)
                           : coeffs_fft(kappa, max_order);
}

std::string map_key(const MapParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "kick=" << p.kick << ";drift=" << p.drift
     << ";sign=" << (p.sign == MapSign::plus ? '+' : '-');
  return os.str();
}

std::string FloquetMatrix::cache_key() const {
  std::ostringstream os;
  os.precision(17);
  os << "U{" << map_key(params) << "|" << planck_key(planck)
     << "|nu=" << nu << ";steps=" << steps_per_application
     << ";kind=" << static_cast<int>(kind) << ";rho=" << rho
     << ";beta_in=" << beta_in << "}";
  return os.str();
}

namespace {

// Shared assembly for the plain and complex-scaled one-step operator.
// scale_exp = 0 disables scaling; otherwise entries pick up
// exp(scale_exp * (l' - l) * ln(rho)).
FloquetMatrix assemble_one_step(const MapParams& p, const PlanckSpec& h,
                                double beta_in, int nu, KickAssembly how,
                                double rho, double scale_sign) {
  const int dim = 2 * nu + 1;
  const double sg = p.sgn();
  const double kappa = p.kick / h.hbar;
  const Eigen::VectorXcd c = kick_coefficients(kappa, 2 * nu, how);
  const auto shift = drift_shift(p, h, beta_in);

  Eigen::VectorXcd kin(dim);
  for (int i = 0; i < dim; ++i) {
    const double l = static_cast<double>(i - nu) + beta_in;
    kin[i] = std::exp(cplx(0.0, -sg * h.hbar * l * l / 2.0));
  }

  const double log_rho = std::log(rho);
  FloquetMatrix u;
  u.entries = Eigen::MatrixXcd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    for (int row = 0; row < dim; ++row) {
      const long d = (row - shift.q) - col;  // kick Toeplitz offset
      if (std::labs(d) > 2 * nu) continue;
      if (row - shift.q < 0 || row - shift.q >= dim) continue;
      const cplx ck = c[static_cast<int>(std::labs(d))];
      if (ck == cplx(0.0, 0.0)) continue;
      cplx e = ck * kin[col];
      if (scale_sign != 0.0)
        e *= std::exp(scale_sign * static_cast<double>(row - col) * log_rho);
      u.entries(row, col) = e;
    }
  }
  u.nu = nu;
  u.steps_per_application = 1;
  u.kind = scale_sign == 0.0 ? OperatorKind::unitary
                             : OperatorKind::complex_scaled;
  u.rho = scale_sign == 0.0 ? 1.0 : rho;
  u.beta_in = beta_in;
  u.beta_out = shift.beta_out;
  u.params = p;
  u.planck = h;
  return u;
}

}  // namespace

FloquetMatrix build_one_step(const MapParams& p, const PlanckSpec& h,
                             double beta_in, int nu, KickAssembly how) {
  if (nu < 1) throw Error("build_one_step: nu must be >= 1");
  return assemble_one_step(p, h, beta_in, nu, how, 1.0, 0.0);
}

Eigen::MatrixXcd gemm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  extern void zgemm_(const char*, const char*, const int*, const int*,
                     const int*, const void*, const void*, const int*,
                     const void*, const int*, const void*, void*, const int*);
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(b.cols());
  const int k = static_cast<int>(a.cols());
  Eigen::MatrixXcd cm(m, n);
  const cplx alpha(1, 0), beta(0, 0);
  zgemm_("N", "N", &m, &n, &k, &alpha, a.data(), &m, b.data(), &k, &beta,
         cm.data(), &m);
  return cm;
}

FloquetMatrix build_circle_operator(const MapParams& p, const PlanckSpec& h,
                                    int nu, KickAssembly how) {
  FloquetMatrix total = build_one_step(p, h, h.beta, nu, how);
  for (long k = 1; k < h.n; ++k) {
    const FloquetMatrix step = build_one_step(p, h, total.beta_out, nu, how);
    total.entries = gemm(step.entries, total.entries);
    total.beta_out = step.beta_out;
  }
  total.steps_per_application = static_cast<int>(h.n);
  return total;
}

FloquetMatrix truncate(const FloquetMatrix& u, int nu_new) {
  if (nu_new > u.nu) throw Error("truncate: nu_new exceeds basis size");
  if (nu_new == u.nu) return u;
  FloquetMatrix t = u;
  const int off = u.nu - nu_new;
  t.entries = u.entries.block(off, off, 2 * nu_new + 1, 2 * nu_new + 1).eval();
  t.nu = nu_new;
  if (t.kind != OperatorKind::complex_scaled) t.kind = OperatorKind::truncated;
  return t;
}

FloquetMatrix build_complex_scaled(const MapParams& p, const PlanckSpec& h,
                                   double rho, int nu, KickAssembly how) {
  if (!(rho > 0.0) || rho > 1.0)
    throw Error("build_complex_scaled: rho must be in (0, 1]");
  const double inv = 1.0 / h.hbar;
  if (h.n != 1 || std::abs(inv - std::round(inv)) > 1e-9)
    throw UnsupportedPlanck(
        "build_complex_scaled: requires hbar = 1/integer with n = 1");
  // The Gamow tails grow along the escape direction (set by the drift sign);
  // the scaling must damp that side to pull resonances into L^2.
  const double scale_sign = p.sgn();
  FloquetMatrix u = assemble_one_step(p, h, 0.0, nu, how, rho, scale_sign);
  if (rho == 1.0) u.rho = 1.0;
  return u;
}

double max_abs_entry(const FloquetMatrix& u) {
  double m = 0.0;
  const auto* d = u.entries.data();
  for (Eigen::Index i = 0; i < u.entries.size(); ++i)
    m = std::max(m, std::abs(d[i]));
  return m;
}

}  // namespace qam
