#pragma once

#include <string>

#include "qam/map.hpp"

namespace qam {

/// Classical r:s resonance chain parameters inferred from phase-space areas
/// and the monodromy trace of the chain's stable periodic orbit.
struct ResonanceChain {
  int r = 1;
  int s = 1;
  double i_rs = 0;             // resonant action
  double mass = 0;             // M = 1/omega'(I_rs)
  double coupling = 0;         // v, resonant harmonic strength
  double s_plus = 0;           // area inside the outer chain separatrix
  double s_minus = 0;          // area inside the inner chain separatrix
  double monodromy_trace = 2;  // trace over r steps
  double chain_freq = 0;       // small-oscillation frequency r*sqrt(2v/M)
};

struct ChainForward {
  double s_plus;
  double s_minus;
  double monodromy_trace;
};

/// Forward formulas: S+ + S- = 4 pi I_rs, S+ - S- = 16 sqrt(2 M v),
/// trace = 2 cos(r^2 sqrt(2v/M)).
ChainForward chain_forward(double i_rs, double mass, double coupling, int r);

/// Inverts the forward formulas for (I_rs, M, v).
ResonanceChain fit_resonance_params(double s_plus, double s_minus,
                                    double monodromy_trace, int r, int s = 1);

/// Measures S+- from the invariant curves traced by the bracketing seeds and
/// the monodromy trace from the period-r orbit near orbit_seed, then fits.
ResonanceChain measure_chain(const MapParams& map, int r, int s,
                             const PhaseState& island_center,
                             const PhaseState& inner_seed,
                             const PhaseState& outer_seed,
                             const PhaseState& orbit_seed,
                             long n_points = 20000);

std::string chain_to_json(const ResonanceChain& c);
ResonanceChain chain_from_json(const std::string& text);

}  // namespace qam
