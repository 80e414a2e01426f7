#include "qam/resonance.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace qam {

ChainForward chain_forward(double i_rs, double mass, double coupling, int r) {
  const double half_sum = kTwoPi * i_rs;                       // (S+ + S-)/2
  const double half_diff = 8.0 * std::sqrt(2.0 * mass * coupling);
  const double root_2vm = std::sqrt(2.0 * coupling / mass);
  return {half_sum + half_diff, half_sum - half_diff,
          2.0 * std::cos(static_cast<double>(r) * r * root_2vm)};
}

ResonanceChain fit_resonance_params(double s_plus, double s_minus,
                                    double monodromy_trace, int r, int s) {
  if (!(s_plus >= s_minus) || !(s_minus > 0))
    throw InconsistentInputs("fit_resonance_params: need S+ >= S- > 0");
  if (std::abs(monodromy_trace) > 2.0)
    throw InconsistentInputs(
        "fit_resonance_params: |trace| > 2, chain orbit not elliptic");
  ResonanceChain c;
  c.r = r;
  c.s = s;
  c.s_plus = s_plus;
  c.s_minus = s_minus;
  c.monodromy_trace = monodromy_trace;
  c.i_rs = (s_plus + s_minus) / (2.0 * kTwoPi);
  const double root_2mv = (s_plus - s_minus) / 16.0;           // sqrt(2Mv)
  const double root_2vm =
      std::acos(monodromy_trace / 2.0) / (static_cast<double>(r) * r);  // sqrt(2v/M)
  c.coupling = 0.5 * root_2mv * root_2vm;
  c.mass = root_2vm > 0 ? root_2mv / root_2vm : 0.0;
  c.chain_freq = r * root_2vm;
  return c;
}

ResonanceChain measure_chain(const MapParams& map, int r, int s,
                             const PhaseState& island_center,
                             const PhaseState& inner_seed,
                             const PhaseState& outer_seed,
                             const PhaseState& orbit_seed, long n_points) {
  const double s_minus =
      orbit_enclosed_area(map, inner_seed, island_center, n_points);
  const double s_plus =
      orbit_enclosed_area(map, outer_seed, island_center, n_points);
  const auto orbit = find_periodic_orbit(map, orbit_seed, r);
  const double trace = monodromy_trace(map, orbit.point, r);
  return fit_resonance_params(s_plus, s_minus, trace, r, s);
}

std::string chain_to_json(const ResonanceChain& c) {
  nlohmann::json j{{"r", c.r},
                   {"s", c.s},
                   {"i_rs", c.i_rs},
                   {"mass", c.mass},
                   {"coupling", c.coupling},
                   {"s_plus", c.s_plus},
                   {"s_minus", c.s_minus},
                   {"monodromy_trace", c.monodromy_trace}};
  return j.dump(2);
}

ResonanceChain chain_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ResonanceChain c;
  c.r = j.at("r").get<int>();
  c.s = j.at("s").get<int>();
  c.i_rs = j.at("i_rs").get<double>();
  c.mass = j.at("mass").get<double>();
  c.coupling = j.at("coupling").get<double>();
  c.s_plus = j.value("s_plus", 0.0);
  c.s_minus = j.value("s_minus", 0.0);
  c.monodromy_trace = j.value("monodromy_trace", 2.0);
  c.chain_freq = c.mass > 0 ? c.r * std::sqrt(2.0 * c.coupling / c.mass) : 0.0;
  return c;
}

}  // namespace qam
