#pragma once

#include <string>
#include <vector>

namespace qam {

/// One decay-rate datum: rates are per kick, Gamma = ln(1/|z|)/(2n) for
/// spectral methods; theory rows carry the formula tag in `method`.
struct DecayPoint {
  double inv_hbar_requested = 0;
  double inv_hbar_snapped = 0;
  long m = 0;
  long n = 1;
  double gamma = 0;
  double w = 0;  // real quasienergy, NaN when not applicable
  std::string method;
  double nu_or_rho = 0;
  double overlap = 0;  // island overlap or probe overlap, -1 when unused
};

struct DecayCurve {
  std::vector<DecayPoint> rows;

  /// Sorts by snapped 1/hbar, then method (the on-disk invariant).
  void canonicalize();
};

std::string decay_curve_csv(const DecayCurve& c);
DecayCurve decay_curve_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qam
