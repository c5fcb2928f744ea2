// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "emchan/optim.hpp"
#include "emchan/scatter.hpp"
#include "emchan/stochastic_env.hpp"
#include "emchan/swf.hpp"

namespace emchan::capacity {

struct SuCapacity {
  double capacity = 0.0;  // bits/s/Hz
  int dof = 0;            // active-mode count under water filling
};

/// Water-filling capacity over the operator's singular values.
SuCapacity single_user_capacity(const swf::RadiationOperator& op, double P_T, double noise);

/// Multi-user simulation setup: geometry, environment and solver knobs shared
/// by the Monte-Carlo capacity estimators.
struct MuScenario {
  swf::SphGeometry geom;
  env::EnvParams env;
  scatter::MomOptions mom;
  int n_users = 10;
  int P = 30;
  CVec3 w = CVec3::Constant(1.0 / std::sqrt(3.0));
  double eps1 = 1e-3;
  int max_iter = 20;
  std::vector<Vec3> fixed_users;                 // optional explicit positions (size n_users)
  std::shared_ptr<const env::Scene> fixed_scene; // optional frozen environment
};

struct CapacityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int ensemble = 0;
};

/// Mean sum capacity over random symbols, user positions and (with
/// scattering) scatterer realizations. The current is optimized per
/// realization; matched seeds give matched users and symbols across the
/// with/without variants.
CapacityEstimate multi_user_capacity(const MuScenario& sc, const swf::RadiationOperator& op,
                                     double P_T, double noise, int ensemble,
                                     std::uint64_t seed, bool with_scattering);

enum class Precoder { mmse, slnr };

/// Interference-aware rates with linear precoding over the mode-domain
/// channel rows. The efficiency scalar multiplies every received power
/// (signal and interference alike).
CapacityEstimate multi_user_capacity_precoded(const MuScenario& sc,
                                              const swf::RadiationOperator& op,
                                              Precoder precoder, double P_T, double noise,
                                              int ensemble, std::uint64_t seed,
                                              bool with_scattering, double efficiency = 1.0);

/// Precoder constructions and the SINR-based sum rate, exposed for direct
/// verification. H rows map mode coefficients to per-user observations;
/// precoder columns carry the per-user transmit vectors with total power P_T.
Eigen::MatrixXcd mmse_precoder(const Eigen::MatrixXcd& H, double P_T, double noise);
Eigen::MatrixXcd slnr_precoder(const Eigen::MatrixXcd& H, double P_T, double noise);
double precoded_sum_rate(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& W, double noise,
                         double efficiency = 1.0);

/// Uniformly distributed positions inside the Rx ball.
std::vector<Vec3> draw_users(const swf::SphGeometry& geom, int count, std::mt19937_64& rng);

}  // namespace emchan::capacity
