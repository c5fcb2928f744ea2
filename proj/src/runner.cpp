// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/runner.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "emchan/capacity.hpp"
#include "emchan/channel_stats.hpp"
#include "emchan/error.hpp"
#include "emchan/optim.hpp"
#include "emchan/rng.hpp"

namespace emchan::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSubcommands = {"acf",         "ccf",     "capacity-su",
                                               "capacity-mu", "dof",     "pattern",
                                               "sweep-svd",   "scene-dump"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const cfg::Scenario& sc, const std::string& subcommand, const std::string& header) {
    body_ << "# emchan " << kVersion << " " << subcommand << "\n";
    body_ << "# config: " << cfg::scenario_to_json(sc) << "\n";
    body_ << "# floats: printf %.12g; byte-identical reruns for a fixed (config, seed, "
             "version) on one platform, cross-platform agreement to ~1e-9 relative\n";
    body_ << header << "\n";
  }

  void raw_row(const std::string& line) { body_ << line << "\n"; }

  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ",";
    out += cells[i];
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorKind::io, "cannot write " + path.string());
  out << content;
}

chanstats::StatsConfig stats_config(const cfg::Scenario& sc) {
  chanstats::StatsConfig cfg;
  cfg.geom = sc.geom;
  cfg.env = sc.environment;
  cfg.mom = sc.solver.mom;
  cfg.k = sc.k();
  cfg.grid.delta_t = sc.grid.delta_t;
  cfg.grid.delta_r = sc.grid.delta_r;
  cfg.grid.tx_points = (sc.grid.tx_lattice_spacing > 0.0)
                           ? chanstats::lattice_in_ball(Vec3::Zero(), sc.geom.R_t,
                                                        sc.grid.tx_lattice_spacing)
                           : std::vector<Vec3>{Vec3::Zero()};
  cfg.grid.rx_points = (sc.grid.rx_lattice_spacing > 0.0)
                           ? chanstats::lattice_in_ball(sc.geom.rx_center(), sc.geom.R_r,
                                                        sc.grid.rx_lattice_spacing)
                           : std::vector<Vec3>{sc.geom.rx_center()};
  cfg.mobility = sc.mobility;
  return cfg;
}

capacity::MuScenario mu_scenario(const cfg::Scenario& sc) {
  capacity::MuScenario mu;
  mu.geom = sc.geom;
  mu.env = sc.environment;
  mu.mom = sc.solver.mom;
  mu.n_users = sc.user_count;
  mu.P = sc.solver.P;
  mu.w = sc.gains;
  mu.eps1 = sc.solver.eps1;
  mu.max_iter = sc.solver.max_iter;
  mu.fixed_users = sc.user_positions;
  if (!sc.scene_file.empty()) {
    std::ifstream in(sc.scene_file);
    if (!in) throw_error(ErrorKind::io, "cannot read scene file: " + sc.scene_file);
    std::stringstream buf;
    buf << in.rdbuf();
    mu.fixed_scene = std::make_shared<env::Scene>(env::scene_from_yaml(buf.str()));
  }
  return mu;
}

swf::RadiationOperator make_operator(const cfg::Scenario& sc, double R_t, double R_r,
                                     double D) {
  swf::SphGeometry geom{R_t, R_r, D};
  int nt = (sc.solver.n_trunc > 0) ? sc.solver.n_trunc : swf::default_truncation(sc.k(), R_t);
  return swf::normalize_modes(geom, sc.k(), nt);
}

std::string run_acf(const cfg::Scenario& sc, CsvFile& csv) {
  auto cfg = stats_config(sc);
  for (double t_ref : sc.acf.t_refs_s) {
    auto free_curve =
        chanstats::temporal_acf(cfg, sc.acf.lags_s, t_ref, sc.acf.ensemble, sc.seed, false);
    auto scat_curve =
        chanstats::temporal_acf(cfg, sc.acf.lags_s, t_ref, sc.acf.ensemble, sc.seed, true);
    for (size_t i = 0; i < free_curve.lags.size(); ++i) {
      csv.raw_row(join({fmt(t_ref), fmt(free_curve.lags[i]), fmt(free_curve.value[i]),
                        fmt(free_curve.se[i]), fmt(scat_curve.value[i]),
                        fmt(scat_curve.se[i])}));
    }
  }
  return "acf.csv";
}

std::string run_ccf(const cfg::Scenario& sc, CsvFile& csv) {
  auto cfg = stats_config(sc);
  Vec3 dir = sc.ccf.direction.normalized();
  std::vector<Vec3> offsets;
  for (double mult : sc.ccf.offsets_lambda) offsets.push_back(mult * sc.wavelength() * dir);
  auto free_curve = chanstats::spatial_ccf(cfg, offsets, sc.ccf.ensemble, sc.seed, false);
  auto scat_curve = chanstats::spatial_ccf(cfg, offsets, sc.ccf.ensemble, sc.seed, true);
  for (size_t i = 0; i < offsets.size(); ++i) {
    csv.raw_row(join({fmt(sc.ccf.offsets_lambda[i]), fmt(free_curve.offsets[i]),
                      fmt(free_curve.value[i]), fmt(free_curve.se[i]),
                      fmt(free_curve.analytic[i]), fmt(scat_curve.value[i]),
                      fmt(scat_curve.se[i])}));
  }
  return "ccf.csv";
}

std::string run_capacity_su(const cfg::Scenario& sc, CsvFile& csv, bool dof_only) {
  std::vector<double> rt_list = sc.sweeps.R_t.empty() ? std::vector<double>{sc.geom.R_t}
                                                      : sc.sweeps.R_t;
  std::vector<double> rr_list = sc.sweeps.R_r.empty() ? std::vector<double>{sc.geom.R_r}
                                                      : sc.sweeps.R_r;
  for (double rt : rt_list) {
    for (double rr : rr_list) {
      auto op = make_operator(sc, rt, rr, sc.geom.D);
      for (double dbm : sc.power_sweep_dbm) {
        auto c = capacity::single_user_capacity(op, dbm_to_power(dbm), sc.noise);
        if (dof_only) {
          csv.raw_row(join({fmt(rt), fmt(rr), fmt(dbm), std::to_string(c.dof)}));
        } else {
          csv.raw_row(
              join({fmt(rt), fmt(rr), fmt(dbm), fmt(c.capacity), std::to_string(c.dof)}));
        }
      }
    }
  }
  return dof_only ? "dof.csv" : "capacity_su.csv";
}

std::string run_capacity_mu(const cfg::Scenario& sc, CsvFile& csv) {
  std::vector<double> d_list = sc.sweeps.D.empty() ? std::vector<double>{sc.geom.D}
                                                   : sc.sweeps.D;
  std::vector<double> rt_list = sc.sweeps.R_t.empty() ? std::vector<double>{sc.geom.R_t}
                                                      : sc.sweeps.R_t;
  std::vector<bool> scat_variants;
  if (sc.capacity.scattering == "on") {
    scat_variants = {true};
  } else if (sc.capacity.scattering == "off") {
    scat_variants = {false};
  } else if (sc.capacity.scattering == "both") {
    scat_variants = {false, true};
  } else {
    throw_error(ErrorKind::config, "capacity.scattering must be on, off or both");
  }
  std::vector<std::string> precoders;
  if (sc.capacity.precoder == "none") {
    precoders = {"none"};
  } else if (sc.capacity.precoder == "mmse") {
    precoders = {"mmse"};
  } else if (sc.capacity.precoder == "slnr") {
    precoders = {"slnr"};
  } else if (sc.capacity.precoder == "both") {
    precoders = {"mmse", "slnr"};
  } else {
    throw_error(ErrorKind::config, "capacity.precoder must be none, mmse, slnr or both");
  }

  for (double d : d_list) {
    for (double rt : rt_list) {
      auto op = make_operator(sc, rt, sc.geom.R_r, d);
      capacity::MuScenario mu = mu_scenario(sc);
      mu.geom = op.geom;
      for (double dbm : sc.power_sweep_dbm) {
        double p_t = dbm_to_power(dbm);
        for (bool with_scat : scat_variants) {
          for (const std::string& pre : precoders) {
            capacity::CapacityEstimate est;
            if (pre == "none") {
              est = capacity::multi_user_capacity(mu, op, p_t, sc.noise,
                                                  sc.capacity.ensemble, sc.seed, with_scat);
            } else {
              auto kind = (pre == "mmse") ? capacity::Precoder::mmse : capacity::Precoder::slnr;
              est = capacity::multi_user_capacity_precoded(mu, op, kind, p_t, sc.noise,
                                                           sc.capacity.ensemble, sc.seed,
                                                           with_scat, sc.capacity.efficiency);
            }
            csv.raw_row(join({fmt(d), fmt(rt), fmt(dbm), std::to_string(with_scat ? 1 : 0),
                              pre, fmt(est.mean), fmt(est.std_error),
                              std::to_string(est.ensemble)}));
          }
        }
      }
    }
  }
  return "capacity_mu.csv";
}

std::string run_pattern(const cfg::Scenario& sc, CsvFile& csv, json& extra) {
  auto op = make_operator(sc, sc.geom.R_t, sc.geom.R_r, sc.geom.D);
  capacity::MuScenario mu = mu_scenario(sc);

  // One realization of users and symbols defines the transmit current.
  std::vector<optim::UserTarget> users(mu.n_users);
  auto urng = make_stream(sc.seed, stream_tag::users, 0);
  auto pos = mu.fixed_users.empty() ? capacity::draw_users(sc.geom, mu.n_users, urng)
                                    : mu.fixed_users;
  auto srng = make_stream(sc.seed, stream_tag::symbols, 0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  for (int k = 0; k < mu.n_users; ++k) {
    users[k].position = pos[k];
    users[k].symbol = std::polar(1.0, ph(srng));
    users[k].w = mu.w;
  }

  env::Scene scene;
  scene.geom = sc.geom;
  if (mu.fixed_scene) {
    scene = *mu.fixed_scene;
  } else if (sc.environment.mean_count > 0.0 && sc.capacity.scattering != "off") {
    auto rng = make_stream(sc.seed, stream_tag::scene, 0);
    scene = env::draw_scene(sc.environment, sc.geom, rng);
  }

  optim::P2Options opts;
  opts.P = sc.solver.P;
  opts.P_T = dbm_to_power(sc.power_sweep_dbm.back());
  opts.eps1 = sc.solver.eps1;
  opts.max_iter = sc.solver.max_iter;
  opts.mom = sc.solver.mom;
  auto p2 = optim::solve_p2(scene, users, op, opts);
  std::span<const cplx> j(p2.j.data(), static_cast<size_t>(p2.j.size()));

  for (const auto& u : users) {
    Spherical s = to_spherical(u.position);
    extra["user_directions_deg"].push_back(
        {s.theta * 180.0 / kPi, s.phi * 180.0 / kPi});
  }

  std::vector<chanstats::Cut> cuts;
  if (sc.pattern.cut == "theta") {
    cuts = {chanstats::Cut::theta};
  } else if (sc.pattern.cut == "phi") {
    cuts = {chanstats::Cut::phi};
  } else if (sc.pattern.cut == "both") {
    cuts = {chanstats::Cut::theta, chanstats::Cut::phi};
  } else {
    throw_error(ErrorKind::config, "pattern.cut must be theta, phi or both");
  }
  for (auto cut : cuts) {
    auto curve = chanstats::radiation_pattern(j, op, cut, sc.pattern.resolution);
    std::string name = (cut == chanstats::Cut::theta) ? "theta" : "phi";
    for (size_t i = 0; i < curve.angle_deg.size(); ++i) {
      csv.raw_row(join({name, fmt(curve.angle_deg[i]), fmt(curve.e_r[i]),
                        fmt(curve.e_theta[i]), fmt(curve.e_phi[i])}));
    }
  }
  return "pattern.csv";
}

std::string run_sweep_svd(const cfg::Scenario& sc, CsvFile& csv) {
  auto op = make_operator(sc, sc.geom.R_t, sc.geom.R_r, sc.geom.D);
  std::vector<int> k_list = sc.sweeps.user_counts.empty() ? std::vector<int>{sc.user_count}
                                                          : sc.sweeps.user_counts;
  int p_hi = std::min(sc.svd_sweep.P_max, op.p_max);
  std::vector<int> P_values;
  for (int p = sc.svd_sweep.P_min; p <= p_hi; ++p) P_values.push_back(p);

  for (int K : k_list) {
    std::vector<optim::UserTarget> users(K);
    auto urng = make_stream(sc.seed, stream_tag::users, static_cast<std::uint64_t>(K));
    auto pos = capacity::draw_users(sc.geom, K, urng);
    auto srng = make_stream(sc.seed, stream_tag::symbols, static_cast<std::uint64_t>(K));
    std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
    for (int k = 0; k < K; ++k) {
      users[k].position = pos[k];
      users[k].symbol = std::polar(1.0, ph(srng));
      users[k].w = sc.gains;
    }
    auto rows = optim::sweep_svd_order(users, op, P_values,
                                       dbm_to_power(sc.svd_sweep.P_T_dbm));
    for (const auto& r : rows) {
      csv.raw_row(join({std::to_string(K), std::to_string(r.P), fmt(r.err), fmt(r.j_power)}));
    }
  }
  return "sweep_svd.csv";
}

std::string run_scene_dump(const cfg::Scenario& sc, std::string& content) {
  auto rng = make_stream(sc.seed, stream_tag::scene, 0);
  env::Scene scene = env::draw_scene(sc.environment, sc.geom, rng);
  auto urng = make_stream(sc.seed, stream_tag::users, 0);
  scene.users = sc.user_positions.empty()
                    ? capacity::draw_users(sc.geom, sc.user_count, urng)
                    : sc.user_positions;
  content = env::scene_to_yaml(scene);
  return "scene.yaml";
}

}  // namespace

bool known_subcommand(const std::string& name) {
  for (const auto& s : kSubcommands) {
    if (s == name) return true;
  }
  return false;
}

std::vector<std::string> subcommand_names() { return kSubcommands; }

RunOutcome run(const cfg::Scenario& sc, const std::string& subcommand) {
  if (!known_subcommand(subcommand)) {
    throw_error(ErrorKind::config, "unknown subcommand: " + subcommand);
  }
  fs::path dir(sc.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_error(ErrorKind::io, "cannot create output directory " + dir.string());

  RunOutcome outcome;
  json extra = json::object();
  std::string result_name;
  std::string result_content;

  if (subcommand == "scene-dump") {
    result_name = run_scene_dump(sc, result_content);
  } else {
    std::string header;
    if (subcommand == "acf") {
      header = "t_ref_s,lag_s,acf_free,se_free,acf_scattering,se_scattering";
    } else if (subcommand == "ccf") {
      header = "offset_lambda,offset_m,ccf_free_mc,se_free,ccf_free_analytic,"
               "ccf_scattering,se_scattering";
    } else if (subcommand == "capacity-su") {
      header = "R_t_m,R_r_m,P_T_dbm,capacity_bps_hz,dof";
    } else if (subcommand == "dof") {
      header = "R_t_m,R_r_m,P_T_dbm,dof";
    } else if (subcommand == "capacity-mu") {
      header = "D_m,R_t_m,P_T_dbm,scattering,precoder,capacity_bps_hz,std_error,ensemble";
    } else if (subcommand == "pattern") {
      header = "cut,angle_deg,e_r,e_theta,e_phi";
    } else if (subcommand == "sweep-svd") {
      header = "K,P,err,j_power";
    }
    CsvFile csv(sc, subcommand, header);
    if (subcommand == "acf") {
      result_name = run_acf(sc, csv);
    } else if (subcommand == "ccf") {
      result_name = run_ccf(sc, csv);
    } else if (subcommand == "capacity-su") {
      result_name = run_capacity_su(sc, csv, false);
    } else if (subcommand == "dof") {
      result_name = run_capacity_su(sc, csv, true);
    } else if (subcommand == "capacity-mu") {
      result_name = run_capacity_mu(sc, csv);
    } else if (subcommand == "pattern") {
      result_name = run_pattern(sc, csv, extra);
    } else if (subcommand == "sweep-svd") {
      result_name = run_sweep_svd(sc, csv);
    }
    result_content = csv.str();
  }

  write_file(dir / result_name, result_content);
  outcome.outputs.push_back((dir / result_name).string());

  json manifest;
  manifest["artifact"] = "emchan";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["seed"] = sc.seed;
  manifest["config"] = json::parse(cfg::scenario_to_json(sc));
  manifest["outputs"] = json::array({result_name});
  manifest["determinism"] =
      "byte-identical outputs for identical (config, seed, version) on one platform";
  if (!extra.empty()) manifest["details"] = extra;
  std::string mname = subcommand + "_manifest.json";
  // scene-dump keeps its manifest name aligned with the data file
  if (subcommand == "scene-dump") mname = "scene_manifest.json";
  write_file(dir / mname, manifest.dump(2) + "\n");
  outcome.outputs.push_back((dir / mname).string());
  return outcome;
}

}  // namespace emchan::runner
