#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qam/config.hpp"
#include "qam/resonance.hpp"

namespace qam {

struct ChainSeeds {
  int r = 1;
  int s = 1;
  PhaseState inner;  // invariant curve just inside the chain
  PhaseState outer;  // invariant curve just outside the chain
  PhaseState orbit;  // near a chain island center
};

struct FigureDef {
  std::string name;
  MapParams map;
  std::vector<ResonanceChain> caption_chains;  // reference values
  std::vector<ChainSeeds> seeds;               // for the classical fit
  double sweep_lo = 4.0;
  double sweep_hi = 20.0;
};

const std::vector<FigureDef>& figure_table();
std::vector<std::string> figure_names();

struct FigureResult {
  std::vector<std::string> files;
  std::vector<std::string> point_errors;
  bool partial() const { return !point_errors.empty(); }
};

/// Reproduces the dataset behind one figure into outdir/<name>/. Per-point
/// failures go to the sidecar log and do not abort the run.
FigureResult run_figure(const std::string& name, const ExperimentConfig& base);

/// Measured island area for the map, cached under the config cache dir.
double island_area_for(const MapParams& map, const ExperimentConfig& cfg);

/// Runs the classical chain fit for the figure's seeds; returns the caption
/// chain on measurement failure (recorded in errors).
ResonanceChain chain_for(const FigureDef& def, std::size_t which,
                         const ExperimentConfig& cfg,
                         std::vector<std::string>* errors);

/// Tries a ring of seeds around the chain radius until a stable period-r
/// orbit is found.
PhaseState find_stable_chain_orbit(const MapParams& map, int r,
                                   const PhaseState& near_point);

}  // namespace qam
