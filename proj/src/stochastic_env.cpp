// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/stochastic_env.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <sstream>

#include "emchan/error.hpp"

namespace emchan::env {

Vec3 placement_center(const swf::SphGeometry& geom, const EnvParams& env) {
  return geom.rx_center() + Vec3(geom.R_r + 3.0 * env.scatterer_radius, 0.0, 0.0);
}

namespace {

bool placement_ok(const Vec3& pos, double a, double gap, const swf::SphGeometry& geom,
                  const std::vector<Scatterer>& existing) {
  if (pos.norm() <= geom.R_t + a + gap) return false;
  if ((pos - geom.rx_center()).norm() <= geom.R_r + a + gap) return false;
  for (const auto& s : existing) {
    if (!s.alive) continue;
    if ((pos - s.center).norm() <= s.radius + a + gap) return false;
  }
  return true;
}

void place_scatterers(Scene& scene, int count, std::mt19937_64& rng) {
  const EnvParams& env = scene.env;
  Vec3 c = placement_center(scene.geom, env);
  std::normal_distribution<double> g;
  double a = env.scatterer_radius;
  double gap = env.effective_clearance();
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < env.max_attempts; ++attempt) {
      Vec3 pos = c + Vec3(g(rng) * env.sigma_ds, g(rng) * env.sigma_as, g(rng) * env.sigma_es);
      if (placement_ok(pos, a, gap, scene.geom, scene.scatterers)) {
        scene.scatterers.push_back({pos, a, true, scene.next_id++});
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw_error(ErrorKind::packing,
                  "draw_scene: could not place a scatterer after " +
                      std::to_string(env.max_attempts) + " attempts");
    }
  }
}

}  // namespace

Scene draw_scene(const EnvParams& env, const swf::SphGeometry& geom, std::mt19937_64& rng) {
  if (env.lambda_B <= 0.0 || env.lambda_D <= 0.0 || env.D_c <= 0.0 || env.P_f < 0.0 ||
      env.P_f > 1.0 || env.mean_count < 0.0) {
    throw_error(ErrorKind::config, "draw_scene: invalid environment parameters");
  }
  Scene scene;
  scene.geom = geom;
  scene.env = env;
  int count = (env.mean_count > 0.0)
                  ? std::poisson_distribution<int>(env.mean_count)(rng)
                  : 0;
  place_scatterers(scene, count, rng);
  return scene;
}

double survival_probability(const EnvParams& env, double dt, double delta_t, double delta_r,
                            double beta_t, double beta_r) {
  if (dt < 0.0 || delta_t < 0.0 || delta_r < 0.0) {
    throw_error(ErrorKind::domain, "survival_probability: increments must be >= 0");
  }
  double time_term = env.lambda_D * env.P_f * (env.dv_rx + env.dv_tx) * dt / env.D_c;
  double space_term =
      env.lambda_D * (delta_t * std::cos(beta_t) + delta_r * std::cos(beta_r)) / env.D_c;
  double p = std::exp(-time_term) * std::exp(-space_term);
  return std::clamp(p, 0.0, 1.0);
}

void evolve(Scene& scene, double dt, double delta_t, double delta_r, std::mt19937_64& rng,
            double beta_t, double beta_r) {
  double p_sur = survival_probability(scene.env, dt, delta_t, delta_r, beta_t, beta_r);
  if (p_sur < 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& s : scene.scatterers) {
      if (s.alive && u(rng) >= p_sur) s.alive = false;
    }
    std::erase_if(scene.scatterers, [](const Scatterer& s) { return !s.alive; });
    double mean_new = scene.env.lambda_B / scene.env.lambda_D * (1.0 - p_sur);
    int births = std::poisson_distribution<int>(mean_new)(rng);
    place_scatterers(scene, births, rng);
  }
  scene.time += dt;
}

std::string scene_to_yaml(const Scene& scene) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "R_t" << YAML::Value << scene.geom.R_t;
  out << YAML::Key << "R_r" << YAML::Value << scene.geom.R_r;
  out << YAML::Key << "D" << YAML::Value << scene.geom.D;
  out << YAML::EndMap;
  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda_B" << YAML::Value << scene.env.lambda_B;
  out << YAML::Key << "lambda_D" << YAML::Value << scene.env.lambda_D;
  out << YAML::Key << "P_f" << YAML::Value << scene.env.P_f;
  out << YAML::Key << "dv_tx" << YAML::Value << scene.env.dv_tx;
  out << YAML::Key << "dv_rx" << YAML::Value << scene.env.dv_rx;
  out << YAML::Key << "D_c" << YAML::Value << scene.env.D_c;
  out << YAML::Key << "sigma_ds" << YAML::Value << scene.env.sigma_ds;
  out << YAML::Key << "sigma_as" << YAML::Value << scene.env.sigma_as;
  out << YAML::Key << "sigma_es" << YAML::Value << scene.env.sigma_es;
  out << YAML::Key << "mean_count" << YAML::Value << scene.env.mean_count;
  out << YAML::Key << "scatterer_radius" << YAML::Value << scene.env.scatterer_radius;
  out << YAML::Key << "clearance" << YAML::Value << scene.env.clearance;
  out << YAML::Key << "max_attempts" << YAML::Value << scene.env.max_attempts;
  out << YAML::EndMap;
  out << YAML::Key << "time" << YAML::Value << scene.time;
  out << YAML::Key << "next_id" << YAML::Value << scene.next_id;
  out << YAML::Key << "scatterers" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : scene.scatterers) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << s.id;
    out << YAML::Key << "alive" << YAML::Value << s.alive;
    out << YAML::Key << "radius" << YAML::Value << s.radius;
    out << YAML::Key << "center" << YAML::Value << YAML::Flow << YAML::BeginSeq << s.center.x()
        << s.center.y() << s.center.z() << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "users" << YAML::Value << YAML::BeginSeq;
  for (const auto& u : scene.users) {
    out << YAML::Flow << YAML::BeginSeq << u.x() << u.y() << u.z() << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Scene scene_from_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw_error(ErrorKind::io, std::string("scene_from_yaml: ") + e.what());
  }
  Scene scene;
  auto geo = root["geometry"];
  scene.geom.R_t = geo["R_t"].as<double>();
  scene.geom.R_r = geo["R_r"].as<double>();
  scene.geom.D = geo["D"].as<double>();
  auto e = root["environment"];
  scene.env.lambda_B = e["lambda_B"].as<double>();
  scene.env.lambda_D = e["lambda_D"].as<double>();
  scene.env.P_f = e["P_f"].as<double>();
  scene.env.dv_tx = e["dv_tx"].as<double>();
  scene.env.dv_rx = e["dv_rx"].as<double>();
  scene.env.D_c = e["D_c"].as<double>();
  scene.env.sigma_ds = e["sigma_ds"].as<double>();
  scene.env.sigma_as = e["sigma_as"].as<double>();
  scene.env.sigma_es = e["sigma_es"].as<double>();
  scene.env.mean_count = e["mean_count"].as<double>();
  scene.env.scatterer_radius = e["scatterer_radius"].as<double>();
  scene.env.clearance = e["clearance"].as<double>();
  scene.env.max_attempts = e["max_attempts"].as<int>();
  scene.time = root["time"].as<double>();
  scene.next_id = root["next_id"].as<std::uint64_t>();
  for (const auto& s : root["scatterers"]) {
    Scatterer sc;
    sc.id = s["id"].as<std::uint64_t>();
    sc.alive = s["alive"].as<bool>();
    sc.radius = s["radius"].as<double>();
    auto c = s["center"];
    sc.center = Vec3(c[0].as<double>(), c[1].as<double>(), c[2].as<double>());
    scene.scatterers.push_back(sc);
  }
  for (const auto& u : root["users"]) {
    scene.users.emplace_back(u[0].as<double>(), u[1].as<double>(), u[2].as<double>());
  }
  return scene;
}

}  // namespace emchan::env
