#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qam/map.hpp"
#include "qam/resonance.hpp"

namespace qam {

/// Resolved run configuration. Every output directory receives the full
/// resolved config (plus the code version) as metadata.
struct ExperimentConfig {
  MapParams map;
  std::vector<double> sweep_grid;  // 1/hbar values
  std::vector<std::string> methods{"truncated"};
  std::vector<int> nu_seq;         // empty -> mode defaults
  std::vector<double> rho_list{0.90, 0.92, 0.94, 0.96, 0.98};
  double beta = 0.0;
  long n_max = 16;
  double snap_bound = 1e-3;
  double stab_tol = 1e-6;
  double tolerance_factor = 2.0;
  std::string outdir = "out";
  bool cache_enabled = true;
  std::string cache_dir;  // empty -> outdir + "/cache"
  bool desk = false;      // CI caps unless set (or QAM_DESK=1)

  int wp_log2() const { return desk ? 17 : 14; }
  long wp_steps() const { return desk ? 16000 : 2000; }
  int nu_cap() const { return desk ? 4096 : 2048; }
  std::vector<int> default_nu_seq() const {
    return desk ? std::vector<int>{1024, 2048} : std::vector<int>{256, 512};
  }
  std::string resolved_cache_dir() const {
    return cache_dir.empty() ? outdir + "/cache" : cache_dir;
  }
};

std::vector<double> make_grid(double lo, double hi, int points);

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// True when QAM_DESK=1 is set in the environment.
bool desk_mode_env();

}  // namespace qam
