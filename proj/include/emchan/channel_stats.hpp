// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "emchan/geometry.hpp"
#include "emchan/scatter.hpp"
#include "emchan/stochastic_env.hpp"
#include "emchan/swf.hpp"

namespace emchan::chanstats {

/// Discretization of the Tx/Rx volumes: sample point lists plus the cell edge
/// lengths whose products are the sample volumes.
struct SampleGrid {
  std::vector<Vec3> tx_points{Vec3::Zero()};
  std::vector<Vec3> rx_points;
  std::array<double, 3> delta_t{0.005, 0.005, 0.005};
  std::array<double, 3> delta_r{0.005, 0.005, 0.005};

  double tx_cell_volume() const { return delta_t[0] * delta_t[1] * delta_t[2]; }
  double rx_cell_volume() const { return delta_r[0] * delta_r[1] * delta_r[2]; }
};

/// Axis-aligned lattice with the given spacing clipped to a ball.
std::vector<Vec3> lattice_in_ball(const Vec3& center, double radius, double spacing);

struct Mobility {
  Vec3 rx_velocity{0.0, 1.0, 0.0};  // m/s, transverse to the link axis by default
};

enum class FieldModel { full, far };

/// Per-pair channel sample: the cell-volume and sinc-factor scaled dyadic
/// kernel between Tx sample n and Rx sample m at time t, and its action on
/// the configured current direction.
struct ChannelEntry {
  Dyad dyad = Dyad::Zero();
  CVec3 h = CVec3::Zero();
};

ChannelEntry channel_entry(const SampleGrid& grid, int m, int n, double t,
                           const Mobility& mobility, FieldModel model, double k,
                           const CVec3& j_dir);

/// Scenario inputs shared by the statistics estimators.
struct StatsConfig {
  swf::SphGeometry geom;
  env::EnvParams env;
  scatter::MomOptions mom;
  double k = 2.0 * kPi / 0.01;
  SampleGrid grid;
  Mobility mobility;
  FieldModel model = FieldModel::full;
  CVec3 j_dir{0.0, 0.0, 1.0};
  int tx_index = 0;
  int rx_index = 0;
};

struct AcfCurve {
  double t_ref = 0.0;
  std::vector<double> lags;
  std::vector<cplx> corr;      // complex normalized correlation
  std::vector<double> value;   // |corr|
  std::vector<double> se;      // jackknife standard error of |corr|
};

/// Normalized temporal autocorrelation of H_mn around the reference time,
/// estimated over independent environment realizations (one birth-death path
/// per realization; the Rx drifts with the mobility model). Free space is
/// deterministic: the curve is exact and the error bars are zero.
AcfCurve temporal_acf(const StatsConfig& cfg, std::span<const double> lags, double t_ref,
                      int ensemble, std::uint64_t seed, bool with_scattering);

struct CcfCurve {
  std::vector<double> offsets;    // |dr| in meters
  std::vector<double> value;      // |normalized correlation|
  std::vector<double> se;
  std::vector<double> analytic;   // closed-kernel reference (free space only)
};

/// Normalized spatial cross-correlation of the received field between
/// rx_point and rx_point + dr for each offset, under independent
/// tri-polarized currents on the Tx grid. The analytic column integrates the
/// currents out through the closed dyadic kernel; the Monte-Carlo column
/// draws them. Offsets must stay inside the Rx ball.
CcfCurve spatial_ccf(const StatsConfig& cfg, std::span<const Vec3> offsets, int ensemble,
                     std::uint64_t seed, bool with_scattering);

enum class Cut { theta, phi };

struct PatternCurve {
  Cut cut = Cut::theta;
  std::vector<double> angle_deg;
  std::vector<double> e_r, e_theta, e_phi;  // field magnitudes per direction
};

/// Far-zone radiation pattern of the mode coefficients on a great-circle cut
/// at a fixed radius 100 wavelengths beyond the Rx shell.
PatternCurve radiation_pattern(std::span<const cplx> j, const swf::RadiationOperator& op,
                               Cut cut, int resolution);

}  // namespace emchan::chanstats
