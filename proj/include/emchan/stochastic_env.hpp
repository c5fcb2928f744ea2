// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "emchan/geometry.hpp"
#include "emchan/swf.hpp"

namespace emchan::env {

/// Ideal-conductor spherical scatterer. Ids are stable across birth-death
/// evolution so survivors can be tracked through time.
struct Scatterer {
  Vec3 center = Vec3::Zero();
  double radius = 0.0025;
  bool alive = true;
  std::uint64_t id = 0;
};

/// Birth-death and placement parameters. Rates follow typical mmWave
/// geometry-based stochastic models; none of them are physical constants and
/// all are exposed in the scenario configuration.
struct EnvParams {
  double lambda_B = 4.0;  // generation rate (1/m)
  double lambda_D = 4.0;  // recombination rate (1/m)
  double P_f = 0.3;       // proportion of moving scatterers
  double dv_tx = 1.0;     // relative speed on the Tx side (m/s)
  double dv_rx = 1.0;     // relative speed on the Rx side (m/s)
  double D_c = 30.0;      // coherence distance (m)
  double sigma_ds = 0.06;  // placement spread along the link axis (m)
  double sigma_as = 0.12;  // transverse spread (m)
  double sigma_es = 0.06;  // vertical spread (m)
  double mean_count = 4.0;     // Poisson mean of the initial scatterer count
  double scatterer_radius = 0.0025;  // m (quarter wavelength at 30 GHz)
  double clearance = -1.0;     // extra gap on top of touching; < 0 means one radius
  int max_attempts = 4000;     // rejection budget per scatterer

  double effective_clearance() const { return clearance < 0.0 ? scatterer_radius : clearance; }
};

/// Snapshot of the propagation scene: geometry, users inside the Rx ball and
/// the current scatterer population. Immutable by convention once handed to a
/// solver; evolve() produces the next snapshot in place.
struct Scene {
  swf::SphGeometry geom;
  EnvParams env;
  std::vector<Scatterer> scatterers;
  std::vector<Vec3> users;
  double time = 0.0;
  std::uint64_t next_id = 1;

  int alive_count() const {
    int n = 0;
    for (const auto& s : scatterers) n += s.alive ? 1 : 0;
    return n;
  }
};

/// Center of the placement density: just outside the Rx ball on the far side,
/// offset by R_r + 3 a along the link axis from the Rx center.
Vec3 placement_center(const swf::SphGeometry& geom, const EnvParams& env);

/// Draw a fresh scene: scatterer count ~ Poisson(mean_count), positions from
/// the anisotropic Gaussian placement density, rejection-sampled to keep every
/// scatterer outside the Tx/Rx balls and non-intersecting.
Scene draw_scene(const EnvParams& env, const swf::SphGeometry& geom, std::mt19937_64& rng);

/// Survival probability over a time step dt and sampling displacements
/// delta_t / delta_r (meters), clamped to [0, 1]:
///   exp(-lambda_D P_f (dv_rx + dv_tx) dt / D_c)
///   * exp(-lambda_D (delta_t cos(beta_t) + delta_r cos(beta_r)) / D_c).
double survival_probability(const EnvParams& env, double dt, double delta_t, double delta_r,
                            double beta_t = 0.0, double beta_r = 0.0);

/// One birth-death step: survivors are kept (ids preserved), newly generated
/// scatterers arrive with count ~ Poisson((lambda_B/lambda_D)(1 - P_sur)),
/// and scene time advances by dt. beta_t / beta_r are the elevation angles of
/// the active Tx/Rx sample points relative to the link axis; callers that do
/// not track sample points leave them at zero.
void evolve(Scene& scene, double dt, double delta_t, double delta_r, std::mt19937_64& rng,
            double beta_t = 0.0, double beta_r = 0.0);

/// Lossless text round trip (doubles carry 17 significant digits).
std::string scene_to_yaml(const Scene& scene);
Scene scene_from_yaml(const std::string& text);

}  // namespace emchan::env
