#include "qam/config.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "qam/curve.hpp"
#include "qam/errors.hpp"

namespace qam {

std::vector<double> make_grid(double lo, double hi, int points) {
  if (points < 1 || !(hi >= lo))
    throw ConfigError("make_grid: need points >= 1 and hi >= lo");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] =
        points == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(points - 1);
  return g;
}

namespace {

MapSign sign_from_string(const std::string& s) {
  if (s == "plus" || s == "+") return MapSign::plus;
  if (s == "minus" || s == "-") return MapSign::minus;
  throw ConfigError("config: sign must be plus or minus, got '" + s + "'");
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("map")) {
      const auto& m = j["map"];
      c.map.kick = m.value("kick", 0.0);
      c.map.drift = m.value("drift", 0.0);
      c.map.sign = sign_from_string(m.value("sign", std::string("minus")));
    }
    if (c.map.kick < 0 || c.map.drift < 0)
      throw ConfigError("config: kick and drift must be nonnegative");
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      if (s.contains("grid")) {
        c.sweep_grid = s["grid"].get<std::vector<double>>();
      } else {
        c.sweep_grid = make_grid(s.value("from", 4.0), s.value("to", 20.0),
                                 s.value("points", 60));
      }
    }
    if (j.contains("methods"))
      c.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("nu_seq")) c.nu_seq = j["nu_seq"].get<std::vector<int>>();
    if (j.contains("rho_list"))
      c.rho_list = j["rho_list"].get<std::vector<double>>();
    c.beta = j.value("beta", 0.0);
    if (c.beta < 0 || c.beta >= 1)
      throw ConfigError("config: beta must lie in [0, 1)");
    c.n_max = j.value("n_max", 16);
    c.snap_bound = j.value("snap_bound", 1e-3);
    c.stab_tol = j.value("stab_tol", 1e-6);
    c.tolerance_factor = j.value("tolerance_factor", 2.0);
    c.outdir = j.value("outdir", std::string("out"));
    if (j.contains("cache")) {
      c.cache_enabled = j["cache"].value("enabled", true);
      c.cache_dir = j["cache"].value("dir", std::string());
    }
    c.desk = j.value("desk", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: schema violation: ") + e.what());
  }
  if (desk_mode_env()) c.desk = true;
  return c;
}

std::string config_to_json_text(const ExperimentConfig& c) {
  nlohmann::json j;
  j["map"] = {{"kick", c.map.kick},
              {"drift", c.map.drift},
              {"sign", c.map.sign == MapSign::plus ? "plus" : "minus"}};
  j["sweep"] = {{"grid", c.sweep_grid}};
  j["methods"] = c.methods;
  j["nu_seq"] = c.nu_seq;
  j["rho_list"] = c.rho_list;
  j["beta"] = c.beta;
  j["n_max"] = c.n_max;
  j["snap_bound"] = c.snap_bound;
  j["stab_tol"] = c.stab_tol;
  j["tolerance_factor"] = c.tolerance_factor;
  j["outdir"] = c.outdir;
  j["cache"] = {{"enabled", c.cache_enabled}, {"dir", c.cache_dir}};
  j["desk"] = c.desk;
  j["version"] = QAM_VERSION;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json_text(read_file(path));
}

bool desk_mode_env() {
  const char* v = std::getenv("QAM_DESK");
  return v && std::string(v) == "1";
}

}  // namespace qam
