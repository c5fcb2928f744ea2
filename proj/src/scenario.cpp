// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "emchan/error.hpp"

namespace emchan::cfg {

using nlohmann::json;

int Scenario::n_trunc() const {
  if (solver.n_trunc > 0) return solver.n_trunc;
  return swf::default_truncation(k(), geom.R_t);
}

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) {
  std::ostringstream out;
  out << "config";
  if (at.Mark().line >= 0) out << " (line " << at.Mark().line + 1 << ")";
  out << ": " << msg;
  throw_error(ErrorKind::config, out.str());
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, where + " must be a mapping");
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(node[key], std::string("bad value for '") + key + "'");
  }
}

Vec3 get_vec3(const YAML::Node& node, const char* key, const Vec3& fallback) {
  if (!node || !node[key]) return fallback;
  const auto& v = node[key];
  if (!v.IsSequence() || v.size() != 3) fail(v, std::string(key) + " must be a list of 3 numbers");
  return Vec3(v[0].as<double>(), v[1].as<double>(), v[2].as<double>());
}

std::array<double, 3> get_triple(const YAML::Node& node, const char* key,
                                 const std::array<double, 3>& fallback) {
  if (!node || !node[key]) return fallback;
  const auto& v = node[key];
  if (v.IsScalar()) {
    double x = v.as<double>();
    return {x, x, x};
  }
  if (!v.IsSequence() || v.size() != 3) {
    fail(v, std::string(key) + " must be a number or a list of 3 numbers");
  }
  return {v[0].as<double>(), v[1].as<double>(), v[2].as<double>()};
}

}  // namespace

Scenario parse_scenario(const YAML::Node& root) {
  Scenario sc;
  if (!root.IsMap()) throw_error(ErrorKind::config, "config: top level must be a mapping");
  check_keys(root, "top level", {"scenario"});
  const YAML::Node s = root["scenario"];
  if (!s) throw_error(ErrorKind::config, "config: missing 'scenario' block");
  check_keys(s, "scenario",
             {"f_c_hz", "seed", "noise", "output_dir", "geometry", "users", "environment",
              "grid", "solver", "power_sweep_dbm", "acf", "ccf", "capacity", "sweeps",
              "pattern", "svd_sweep", "mobility", "scene_file"});

  sc.f_c = get<double>(s, "f_c_hz", sc.f_c);
  if (s["seed"]) {
    sc.seed = s["seed"].as<std::uint64_t>();
  } else {
    sc.seed_defaulted = true;
  }
  sc.noise = get<double>(s, "noise", sc.noise);
  sc.output_dir = get<std::string>(s, "output_dir", sc.output_dir);
  sc.scene_file = get<std::string>(s, "scene_file", sc.scene_file);

  if (const auto g = s["geometry"]) {
    check_keys(g, "geometry", {"R_t", "R_r", "D"});
    sc.geom.R_t = get<double>(g, "R_t", sc.geom.R_t);
    sc.geom.R_r = get<double>(g, "R_r", sc.geom.R_r);
    sc.geom.D = get<double>(g, "D", sc.geom.D);
  }

  if (const auto u = s["users"]) {
    check_keys(u, "users", {"count", "positions", "gains"});
    sc.user_count = get<int>(u, "count", sc.user_count);
    if (u["positions"]) {
      for (const auto& p : u["positions"]) {
        if (!p.IsSequence() || p.size() != 3) fail(p, "user position must be [x, y, z]");
        sc.user_positions.emplace_back(p[0].as<double>(), p[1].as<double>(), p[2].as<double>());
      }
    }
    if (u["gains"]) {
      const auto& g = u["gains"];
      if (!g.IsSequence() || g.size() != 3) fail(g, "gains must be a list of 3 numbers");
      for (int i = 0; i < 3; ++i) sc.gains(i) = g[i].as<double>();
    }
  }

  if (const auto e = s["environment"]) {
    check_keys(e, "environment",
               {"lambda_B", "lambda_D", "P_f", "dv_tx", "dv_rx", "D_c", "sigma_ds", "sigma_as",
                "sigma_es", "mean_count", "scatterer_radius", "clearance", "max_attempts"});
    auto& env = sc.environment;
    env.lambda_B = get<double>(e, "lambda_B", env.lambda_B);
    env.lambda_D = get<double>(e, "lambda_D", env.lambda_D);
    env.P_f = get<double>(e, "P_f", env.P_f);
    env.dv_tx = get<double>(e, "dv_tx", env.dv_tx);
    env.dv_rx = get<double>(e, "dv_rx", env.dv_rx);
    env.D_c = get<double>(e, "D_c", env.D_c);
    env.sigma_ds = get<double>(e, "sigma_ds", env.sigma_ds);
    env.sigma_as = get<double>(e, "sigma_as", env.sigma_as);
    env.sigma_es = get<double>(e, "sigma_es", env.sigma_es);
    env.mean_count = get<double>(e, "mean_count", env.mean_count);
    env.scatterer_radius = get<double>(e, "scatterer_radius", env.scatterer_radius);
    env.clearance = get<double>(e, "clearance", env.clearance);
    env.max_attempts = get<int>(e, "max_attempts", env.max_attempts);
  }

  if (const auto g = s["grid"]) {
    check_keys(g, "grid", {"delta_t", "delta_r", "tx_lattice_spacing", "rx_lattice_spacing"});
    sc.grid.delta_t = get_triple(g, "delta_t", sc.grid.delta_t);
    sc.grid.delta_r = get_triple(g, "delta_r", sc.grid.delta_r);
    sc.grid.tx_lattice_spacing = get<double>(g, "tx_lattice_spacing", 0.0);
    sc.grid.rx_lattice_spacing = get<double>(g, "rx_lattice_spacing", 0.0);
  }

  if (const auto v = s["solver"]) {
    check_keys(v, "solver", {"P", "eps1", "max_iter", "lambda_tol", "n_trunc", "mom"});
    sc.solver.P = get<int>(v, "P", sc.solver.P);
    sc.solver.eps1 = get<double>(v, "eps1", sc.solver.eps1);
    sc.solver.max_iter = get<int>(v, "max_iter", sc.solver.max_iter);
    sc.solver.lambda_tol = get<double>(v, "lambda_tol", sc.solver.lambda_tol);
    sc.solver.n_trunc = get<int>(v, "n_trunc", sc.solver.n_trunc);
    if (const auto m = v["mom"]) {
      check_keys(m, "solver.mom",
                 {"basis_count", "match_points", "te_only", "surface_theta", "surface_phi",
                  "condition_limit"});
      sc.solver.mom.basis_count = get<int>(m, "basis_count", sc.solver.mom.basis_count);
      sc.solver.mom.match_points = get<int>(m, "match_points", sc.solver.mom.match_points);
      sc.solver.mom.te_only = get<bool>(m, "te_only", sc.solver.mom.te_only);
      sc.solver.mom.surface_theta = get<int>(m, "surface_theta", sc.solver.mom.surface_theta);
      sc.solver.mom.surface_phi = get<int>(m, "surface_phi", sc.solver.mom.surface_phi);
      sc.solver.mom.condition_limit =
          get<double>(m, "condition_limit", sc.solver.mom.condition_limit);
    }
  }

  if (s["power_sweep_dbm"]) {
    sc.power_sweep_dbm = s["power_sweep_dbm"].as<std::vector<double>>();
  }

  if (const auto a = s["acf"]) {
    check_keys(a, "acf", {"lags_s", "t_refs_s", "ensemble"});
    if (a["lags_s"]) sc.acf.lags_s = a["lags_s"].as<std::vector<double>>();
    if (a["t_refs_s"]) sc.acf.t_refs_s = a["t_refs_s"].as<std::vector<double>>();
    sc.acf.ensemble = get<int>(a, "ensemble", sc.acf.ensemble);
  }
  if (const auto c = s["ccf"]) {
    check_keys(c, "ccf", {"offsets_lambda", "direction", "ensemble"});
    if (c["offsets_lambda"]) sc.ccf.offsets_lambda = c["offsets_lambda"].as<std::vector<double>>();
    sc.ccf.direction = get_vec3(c, "direction", sc.ccf.direction);
    sc.ccf.ensemble = get<int>(c, "ensemble", sc.ccf.ensemble);
  }
  if (const auto c = s["capacity"]) {
    check_keys(c, "capacity", {"ensemble", "scattering", "precoder", "efficiency"});
    sc.capacity.ensemble = get<int>(c, "ensemble", sc.capacity.ensemble);
    sc.capacity.scattering = get<std::string>(c, "scattering", sc.capacity.scattering);
    sc.capacity.precoder = get<std::string>(c, "precoder", sc.capacity.precoder);
    sc.capacity.efficiency = get<double>(c, "efficiency", sc.capacity.efficiency);
  }
  if (const auto w = s["sweeps"]) {
    check_keys(w, "sweeps", {"R_t", "R_r", "D", "user_counts"});
    if (w["R_t"]) sc.sweeps.R_t = w["R_t"].as<std::vector<double>>();
    if (w["R_r"]) sc.sweeps.R_r = w["R_r"].as<std::vector<double>>();
    if (w["D"]) sc.sweeps.D = w["D"].as<std::vector<double>>();
    if (w["user_counts"]) sc.sweeps.user_counts = w["user_counts"].as<std::vector<int>>();
  }
  if (const auto p = s["pattern"]) {
    check_keys(p, "pattern", {"cut", "resolution"});
    sc.pattern.cut = get<std::string>(p, "cut", sc.pattern.cut);
    sc.pattern.resolution = get<int>(p, "resolution", sc.pattern.resolution);
  }
  if (const auto v = s["svd_sweep"]) {
    check_keys(v, "svd_sweep", {"P_min", "P_max", "P_T_dbm"});
    sc.svd_sweep.P_min = get<int>(v, "P_min", sc.svd_sweep.P_min);
    sc.svd_sweep.P_max = get<int>(v, "P_max", sc.svd_sweep.P_max);
    sc.svd_sweep.P_T_dbm = get<double>(v, "P_T_dbm", sc.svd_sweep.P_T_dbm);
  }
  if (const auto m = s["mobility"]) {
    check_keys(m, "mobility", {"rx_velocity"});
    sc.mobility.rx_velocity = get_vec3(m, "rx_velocity", sc.mobility.rx_velocity);
  }

  // Physical consistency.
  if (sc.f_c <= 0.0) throw_error(ErrorKind::config, "config: f_c_hz must be positive");
  if (sc.geom.R_t <= 0.0 || sc.geom.R_r <= 0.0 || sc.geom.D <= 0.0) {
    throw_error(ErrorKind::config, "config: geometry radii and distance must be positive");
  }
  auto check_geom = [&](double R_t, double R_r, double D) {
    if (D <= R_t + R_r) {
      std::ostringstream out;
      out << "config: geometry is inconsistent: D = " << D << " must exceed R_t + R_r = "
          << R_t + R_r;
      throw_error(ErrorKind::config, out.str());
    }
  };
  check_geom(sc.geom.R_t, sc.geom.R_r, sc.geom.D);
  for (double rt : sc.sweeps.R_t) check_geom(rt, sc.geom.R_r, sc.geom.D);
  for (double rr : sc.sweeps.R_r) check_geom(sc.geom.R_t, rr, sc.geom.D);
  for (double d : sc.sweeps.D) check_geom(sc.geom.R_t, sc.geom.R_r, d);
  if (!sc.user_positions.empty()) {
    if (static_cast<int>(sc.user_positions.size()) != sc.user_count) {
      throw_error(ErrorKind::config, "config: users.positions size must equal users.count");
    }
    for (const auto& p : sc.user_positions) {
      if ((p - sc.geom.rx_center()).norm() > sc.geom.R_r) {
        throw_error(ErrorKind::config, "config: explicit user position outside the Rx ball");
      }
    }
  }
  if (sc.user_count < 0) throw_error(ErrorKind::config, "config: users.count must be >= 0");
  if (sc.noise <= 0.0) throw_error(ErrorKind::config, "config: noise must be positive");
  if (sc.solver.P < 1) throw_error(ErrorKind::config, "config: solver.P must be >= 1");
  if (2 * sc.solver.mom.match_points < sc.solver.mom.basis_count) {
    throw_error(ErrorKind::config,
                "config: solver.mom needs 2 * match_points >= basis_count");
  }
  if (sc.solver.P > sc.p_max()) {
    throw_error(ErrorKind::config, "config: solver.P exceeds the mode count of the expansion");
  }
  if (sc.gains.norm() == 0.0) throw_error(ErrorKind::config, "config: gains must be nonzero");
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::io, "cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

Scenario parse_scenario_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw_error(ErrorKind::config, std::string("config parse error: ") + e.what());
  }
  return parse_scenario(root);
}

void apply_override(YAML::Node& root, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw_error(ErrorKind::config, "override: empty key");
  std::vector<std::string> parts{"scenario"};
  std::string cur;
  for (char ch : dotted_key) {
    if (ch == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);

  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::ParserException& e) {
    throw_error(ErrorKind::config, "override value parse error: " + std::string(e.what()));
  }

  // Walk down, keeping yaml-cpp's shared-node semantics intact.
  std::vector<YAML::Node> chain{root};
  for (const auto& p : parts) {
    YAML::Node child = chain.back()[p];
    chain.push_back(child);
  }
  chain.back() = parsed;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["f_c_hz"] = sc.f_c;
  j["seed"] = sc.seed;
  j["noise"] = sc.noise;
  j["output_dir"] = sc.output_dir;
  j["geometry"] = {{"R_t", sc.geom.R_t}, {"R_r", sc.geom.R_r}, {"D", sc.geom.D}};
  j["users"]["count"] = sc.user_count;
  if (!sc.user_positions.empty()) {
    for (const auto& p : sc.user_positions) {
      j["users"]["positions"].push_back({p.x(), p.y(), p.z()});
    }
  }
  j["users"]["gains"] = {sc.gains(0).real(), sc.gains(1).real(), sc.gains(2).real()};
  const auto& e = sc.environment;
  j["environment"] = {{"lambda_B", e.lambda_B},
                      {"lambda_D", e.lambda_D},
                      {"P_f", e.P_f},
                      {"dv_tx", e.dv_tx},
                      {"dv_rx", e.dv_rx},
                      {"D_c", e.D_c},
                      {"sigma_ds", e.sigma_ds},
                      {"sigma_as", e.sigma_as},
                      {"sigma_es", e.sigma_es},
                      {"mean_count", e.mean_count},
                      {"scatterer_radius", e.scatterer_radius},
                      {"clearance", e.clearance},
                      {"max_attempts", e.max_attempts}};
  j["grid"] = {{"delta_t", sc.grid.delta_t},
               {"delta_r", sc.grid.delta_r},
               {"tx_lattice_spacing", sc.grid.tx_lattice_spacing},
               {"rx_lattice_spacing", sc.grid.rx_lattice_spacing}};
  j["solver"] = {{"P", sc.solver.P},
                 {"eps1", sc.solver.eps1},
                 {"max_iter", sc.solver.max_iter},
                 {"lambda_tol", sc.solver.lambda_tol},
                 {"n_trunc", sc.n_trunc()},
                 {"mom",
                  {{"basis_count", sc.solver.mom.basis_count},
                   {"match_points", sc.solver.mom.match_points},
                   {"te_only", sc.solver.mom.te_only}}}};
  j["power_sweep_dbm"] = sc.power_sweep_dbm;
  j["acf"] = {{"lags_s", sc.acf.lags_s},
              {"t_refs_s", sc.acf.t_refs_s},
              {"ensemble", sc.acf.ensemble}};
  j["ccf"] = {{"offsets_lambda", sc.ccf.offsets_lambda},
              {"direction", {sc.ccf.direction.x(), sc.ccf.direction.y(), sc.ccf.direction.z()}},
              {"ensemble", sc.ccf.ensemble}};
  j["capacity"] = {{"ensemble", sc.capacity.ensemble},
                   {"scattering", sc.capacity.scattering},
                   {"precoder", sc.capacity.precoder},
                   {"efficiency", sc.capacity.efficiency}};
  j["sweeps"] = {{"R_t", sc.sweeps.R_t},
                 {"R_r", sc.sweeps.R_r},
                 {"D", sc.sweeps.D},
                 {"user_counts", sc.sweeps.user_counts}};
  j["pattern"] = {{"cut", sc.pattern.cut}, {"resolution", sc.pattern.resolution}};
  j["svd_sweep"] = {{"P_min", sc.svd_sweep.P_min},
                    {"P_max", sc.svd_sweep.P_max},
                    {"P_T_dbm", sc.svd_sweep.P_T_dbm}};
  j["mobility"]["rx_velocity"] = {sc.mobility.rx_velocity.x(), sc.mobility.rx_velocity.y(),
                                  sc.mobility.rx_velocity.z()};
  if (!sc.scene_file.empty()) j["scene_file"] = sc.scene_file;
  return j.dump();
}

std::string validate_report(const Scenario& sc) {
  std::ostringstream out;
  out << "scenario: valid\n";
  out << "carrier: f_c = " << sc.f_c << " Hz, wavelength = " << sc.wavelength() << " m, k = "
      << sc.k() << " rad/m\n";
  out << "geometry: R_t = " << sc.geom.R_t << " m, R_r = " << sc.geom.R_r << " m, D = "
      << sc.geom.D << " m (D > R_t + R_r holds)\n";
  if (sc.seed_defaulted) {
    out << "note: seed missing from config, default " << sc.seed << " applied\n";
  }
  int nt = sc.n_trunc();
  int pm = sc.p_max();
  out << "expansion: n_trunc = " << nt << ", mode count P_max = " << pm << ", solver P = "
      << sc.solver.P << "\n";
  long norm_nodes = 2L * (nt + 4) * (nt + 2) * (2 * nt + 2);
  out << "cost estimate: operator norms ~" << norm_nodes << " quadrature nodes x " << pm
      << " modes";
  out << " (~" << static_cast<double>(norm_nodes) * pm * 1e-6 << "e6 mode evaluations)\n";
  double mom_rows = 2.0 * sc.environment.mean_count * sc.solver.mom.match_points;
  double mom_cols = sc.environment.mean_count * sc.solver.mom.basis_count;
  out << "cost estimate: matching system ~" << mom_rows << " x " << mom_cols
      << " per scene at the mean scatterer count\n";
  return out.str();
}

}  // namespace emchan::cfg
