// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <string>
#include <vector>

#include "emchan/capacity.hpp"
#include "emchan/channel_stats.hpp"
#include "emchan/scatter.hpp"
#include "emchan/stochastic_env.hpp"
#include "emchan/swf.hpp"

namespace emchan::cfg {

/// Fully resolved simulation scenario. Every field has a documented default;
/// the YAML schema mirrors the nesting here and unknown keys are rejected.
struct Scenario {
  double f_c = 30e9;                   // carrier frequency (Hz)
  std::uint64_t seed = 1;
  bool seed_defaulted = false;         // true when the config omitted the seed
  double noise = 1.0;                  // normalized AWGN floor
  std::string output_dir = "out";

  swf::SphGeometry geom{0.02, 0.2, 10.0};

  int user_count = 10;
  std::vector<Vec3> user_positions;    // empty = random per realization
  CVec3 gains = CVec3::Constant(1.0 / std::sqrt(3.0));

  env::EnvParams environment;

  struct Grid {
    std::array<double, 3> delta_t{0.005, 0.005, 0.005};
    std::array<double, 3> delta_r{0.005, 0.005, 0.005};
    double tx_lattice_spacing = 0.0;   // 0 = single sample at the Tx center
    double rx_lattice_spacing = 0.0;   // 0 = single sample at the Rx center
  } grid;

  struct Solver {
    int P = 30;
    double eps1 = 1e-3;
    int max_iter = 20;
    double lambda_tol = 1e-6;
    int n_trunc = 0;                   // 0 = ceil(k R_t) + 10
    scatter::MomOptions mom;
  } solver;

  std::vector<double> power_sweep_dbm{30.0, 35.0, 40.0, 45.0, 50.0};

  struct Acf {
    std::vector<double> lags_s{0.0, 0.001, 0.002, 0.003, 0.004, 0.005,
                               0.006, 0.007, 0.008, 0.009, 0.010};
    std::vector<double> t_refs_s{0.0, 2.0};
    int ensemble = 200;
  } acf;

  struct Ccf {
    std::vector<double> offsets_lambda{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75,
                                       1.0, 1.25, 1.5, 1.75, 2.0};
    Vec3 direction{0.0, 1.0, 0.0};
    int ensemble = 200;
  } ccf;

  struct Capacity {
    int ensemble = 100;
    std::string scattering = "both";   // on | off | both
    std::string precoder = "none";     // none | mmse | slnr | both
    double efficiency = 1.0;
  } capacity;

  struct Sweeps {
    std::vector<double> R_t;           // empty = just the base geometry
    std::vector<double> R_r;
    std::vector<double> D;
    std::vector<int> user_counts;      // for the expansion-order sweep
  } sweeps;

  struct Pattern {
    std::string cut = "both";          // theta | phi | both
    int resolution = 361;
  } pattern;

  struct SvdSweep {
    int P_min = 1;
    int P_max = 30;
    double P_T_dbm = 150.0;            // effectively unconstrained by default
  } svd_sweep;

  chanstats::Mobility mobility;
  std::string scene_file;              // fixed environment instead of random draws

  double wavelength() const { return kSpeedOfLight / f_c; }
  double k() const { return 2.0 * kPi * f_c / kSpeedOfLight; }
  int n_trunc() const;
  int p_max() const { return swf::mode_count(n_trunc()); }
};

/// Parse and validate; throws Error(config) with line diagnostics on schema
/// violations, unknown keys or inconsistent physics.
Scenario parse_scenario(const YAML::Node& root);
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

/// Set a dotted-path key ("solver.P", "geometry.D") on a raw config tree; the
/// value string is parsed as YAML so lists work ("[30, 40]").
void apply_override(YAML::Node& root, const std::string& dotted_key, const std::string& value);

/// Resolved-config echo used in result-file headers and manifests.
std::string scenario_to_json(const Scenario& sc);

/// Schema + physics report plus a cost estimate; no simulation is run.
std::string validate_report(const Scenario& sc);

}  // namespace emchan::cfg
