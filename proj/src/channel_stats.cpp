// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/channel_stats.hpp"

#include <algorithm>
#include <cmath>

#include "emchan/error.hpp"
#include "emchan/green.hpp"
#include "emchan/parallel.hpp"
#include "emchan/rng.hpp"

namespace emchan::chanstats {

std::vector<Vec3> lattice_in_ball(const Vec3& center, double radius, double spacing) {
  std::vector<Vec3> pts;
  int half = static_cast<int>(std::floor(radius / spacing));
  for (int ix = -half; ix <= half; ++ix) {
    for (int iy = -half; iy <= half; ++iy) {
      for (int iz = -half; iz <= half; ++iz) {
        Vec3 offset(ix * spacing, iy * spacing, iz * spacing);
        if (offset.norm() <= radius) pts.push_back(center + offset);
      }
    }
  }
  return pts;
}

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Cell-volume and sinc prefactor of the discretized channel between fixed
// Tx/Rx sample positions.
double cell_prefactor(const SampleGrid& grid, const Vec3& rx, const Vec3& tx, double k) {
  double r = (rx - tx).norm();
  if (r == 0.0) throw_error(ErrorKind::singularity, "channel_entry: coincident sample points");
  double s = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    s *= sinc(0.5 * k * (rx(axis) - tx(axis)) * grid.delta_t[axis] / r);
  }
  return grid.tx_cell_volume() * grid.rx_cell_volume() * s;
}

Dyad direct_kernel(const SampleGrid& grid, const Vec3& rx, const Vec3& tx, FieldModel model,
                   double k) {
  green::Part part = (model == FieldModel::far) ? green::Part::far : green::Part::full;
  return cell_prefactor(grid, rx, tx, k) * green::dyadic_green(rx, tx, k, part);
}

}  // namespace

ChannelEntry channel_entry(const SampleGrid& grid, int m, int n, double t,
                           const Mobility& mobility, FieldModel model, double k,
                           const CVec3& j_dir) {
  if (m < 0 || m >= static_cast<int>(grid.rx_points.size()) || n < 0 ||
      n >= static_cast<int>(grid.tx_points.size())) {
    throw_error(ErrorKind::config, "channel_entry: sample index out of range");
  }
  Vec3 rx = grid.rx_points[m] + t * mobility.rx_velocity;
  ChannelEntry e;
  e.dyad = direct_kernel(grid, rx, grid.tx_points[n], model, k);
  e.h = e.dyad * j_dir;
  return e;
}

namespace {

// Response h at one Rx sample from one Tx sample, direct plus scattered. The
// cell prefactor (volumes and sincs) multiplies both contributions.
CVec3 pair_response(const StatsConfig& cfg, const Vec3& rx, const Vec3& tx,
                    const scatter::SurfaceSystem* sys,
                    const scatter::SurfaceCurrentSolution* sol) {
  Dyad g = direct_kernel(cfg.grid, rx, tx, cfg.model, cfg.k);
  CVec3 h = g * cfg.j_dir;
  if (sys != nullptr && !sys->empty()) {
    double pre = cell_prefactor(cfg.grid, rx, tx, cfg.k);
    h += pre * (sys->field_matrix(rx) * sol->coeff);
  }
  return h;
}

std::vector<double> jackknife_se_abs(const std::vector<cplx>& vals,
                                     const std::vector<double>& p_ref,
                                     const std::vector<double>& p_lag, double* estimate) {
  // Ratio estimator |sum v| / sqrt(sum p_ref sum p_lag) with leave-one-out
  // error bars.
  int n = static_cast<int>(vals.size());
  cplx sv = 0.0;
  double sr = 0.0, sl = 0.0;
  for (int i = 0; i < n; ++i) {
    sv += vals[i];
    sr += p_ref[i];
    sl += p_lag[i];
  }
  double full = std::abs(sv) / std::sqrt(std::max(sr * sl, 1e-300));
  if (estimate) *estimate = full;
  if (n < 2) return {0.0};
  std::vector<double> loo(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx v = sv - vals[i];
    double r = sr - p_ref[i], l = sl - p_lag[i];
    loo[i] = std::abs(v) / std::sqrt(std::max(r * l, 1e-300));
    mean += loo[i];
  }
  mean /= n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += (loo[i] - mean) * (loo[i] - mean);
  return {std::sqrt(acc * (n - 1.0) / n)};
}

}  // namespace

AcfCurve temporal_acf(const StatsConfig& cfg, std::span<const double> lags, double t_ref,
                      int ensemble, std::uint64_t seed, bool with_scattering) {
  if (ensemble < 1) throw_error(ErrorKind::config, "temporal_acf: ensemble_size must be >= 1");
  if (cfg.grid.rx_points.empty() || cfg.grid.tx_points.empty()) {
    throw_error(ErrorKind::config, "temporal_acf: empty sample grid");
  }
  const Vec3 tx = cfg.grid.tx_points[cfg.tx_index];
  const Vec3 rx0 = cfg.grid.rx_points[cfg.rx_index];

  // Times walked by every realization: reference first, then each lag.
  std::vector<double> times{t_ref};
  for (double lag : lags) {
    if (lag < 0.0 && t_ref + lag < 0.0) {
      throw_error(ErrorKind::config, "temporal_acf: negative lag before the scene origin");
    }
    times.push_back(t_ref + lag);
  }

  struct Slot {
    std::vector<CVec3> h;  // response at each time
  };
  std::vector<Slot> slots(ensemble);

  parallel_for(ensemble, [&](int i) {
    auto rng = make_stream(seed, stream_tag::scene, static_cast<std::uint64_t>(i));
    env::Scene scene;
    if (with_scattering) scene = env::draw_scene(cfg.env, cfg.geom, rng);

    auto& slot = slots[i];
    slot.h.resize(times.size());
    // Walk times in ascending order so the birth-death path is a single
    // forward evolution; responses are then picked per requested time.
    std::vector<size_t> order(times.size());
    for (size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return times[a] < times[b]; });
    double now = 0.0;
    for (size_t j : order) {
      double t = times[j];
      if (with_scattering && t > now) {
        evolve(scene, t - now, 0.0, 0.0, rng);
      }
      now = std::max(now, t);
      Vec3 rx = rx0 + t * cfg.mobility.rx_velocity;
      if (with_scattering && scene.alive_count() > 0) {
        auto sys = scatter::SurfaceSystem::from_scene(scene, cfg.k, cfg.k * kSpeedOfLight,
                                                      kVacuumPermeability, cfg.mom);
        CVec3 jd = cfg.j_dir;
        Vec3 txp = tx;
        double kk = cfg.k;
        swf::FieldFn incident = [jd, txp, kk](const Vec3& r) -> ComplexVec3 {
          return {green::dyadic_green(r, txp, kk) * jd, Basis::cartesian};
        };
        auto sol = sys.solve(incident);
        slot.h[j] = pair_response(cfg, rx, tx, &sys, &sol);
      } else {
        slot.h[j] = pair_response(cfg, rx, tx, nullptr, nullptr);
      }
    }
  });

  AcfCurve curve;
  curve.t_ref = t_ref;
  for (size_t lag_idx = 0; lag_idx < lags.size(); ++lag_idx) {
    std::vector<cplx> vals(ensemble);
    std::vector<double> pr(ensemble), pl(ensemble);
    for (int i = 0; i < ensemble; ++i) {
      const CVec3& a = slots[i].h[0];
      const CVec3& b = slots[i].h[lag_idx + 1];
      vals[i] = b.dot(a);  // trace of a b^H
      pr[i] = a.squaredNorm();
      pl[i] = b.squaredNorm();
    }
    double estimate = 0.0;
    auto se = jackknife_se_abs(vals, pr, pl, &estimate);
    cplx sv = 0.0;
    double sr = 0.0, sl = 0.0;
    for (int i = 0; i < ensemble; ++i) {
      sv += vals[i];
      sr += pr[i];
      sl += pl[i];
    }
    curve.lags.push_back(lags[lag_idx]);
    curve.corr.push_back(sv / std::sqrt(std::max(sr * sl, 1e-300)));
    curve.value.push_back(estimate);
    curve.se.push_back(se[0]);
  }
  return curve;
}

CcfCurve spatial_ccf(const StatsConfig& cfg, std::span<const Vec3> offsets, int ensemble,
                     std::uint64_t seed, bool with_scattering) {
  if (ensemble < 1) throw_error(ErrorKind::config, "spatial_ccf: ensemble_size must be >= 1");
  const Vec3 rx_a = cfg.grid.rx_points[cfg.rx_index];
  const Vec3 rx_center = cfg.geom.rx_center();
  const int n_tx = static_cast<int>(cfg.grid.tx_points.size());
  const int n_off = static_cast<int>(offsets.size());

  for (const Vec3& dr : offsets) {
    if ((rx_a + dr - rx_center).norm() > cfg.geom.R_r) {
      throw_error(ErrorKind::domain, "spatial_ccf: offset leaves the Rx ball");
    }
  }

  // Per-sample direct kernels at the base point and each offset point.
  std::vector<Dyad> k_a(n_tx);
  std::vector<std::vector<Dyad>> k_b(n_off, std::vector<Dyad>(n_tx));
  for (int n = 0; n < n_tx; ++n) {
    k_a[n] = direct_kernel(cfg.grid, rx_a, cfg.grid.tx_points[n], cfg.model, cfg.k);
    for (int o = 0; o < n_off; ++o) {
      k_b[o][n] =
          direct_kernel(cfg.grid, rx_a + offsets[o], cfg.grid.tx_points[n], cfg.model, cfg.k);
    }
  }

  CcfCurve curve;
  for (const Vec3& dr : offsets) curve.offsets.push_back(dr.norm());

  // Closed-kernel reference with the currents integrated out (free space).
  curve.analytic.assign(n_off, 0.0);
  {
    double pa = 0.0;
    std::vector<cplx> cross(n_off, 0.0);
    std::vector<double> pb(n_off, 0.0);
    for (int n = 0; n < n_tx; ++n) {
      pa += k_a[n].squaredNorm();
      for (int o = 0; o < n_off; ++o) {
        cross[o] += (k_b[o][n].adjoint() * k_a[n]).trace();
        pb[o] += k_b[o][n].squaredNorm();
      }
    }
    for (int o = 0; o < n_off; ++o) {
      curve.analytic[o] = std::abs(cross[o]) / std::sqrt(std::max(pa * pb[o], 1e-300));
    }
  }

  struct Slot {
    std::vector<cplx> cross;
    std::vector<double> pb;
    double pa = 0.0;
  };
  std::vector<Slot> slots(ensemble);

  parallel_for(ensemble, [&](int i) {
    auto& slot = slots[i];
    slot.cross.assign(n_off, 0.0);
    slot.pb.assign(n_off, 0.0);

    std::vector<Dyad> tk_a = k_a;
    std::vector<std::vector<Dyad>> tk_b = k_b;
    if (with_scattering) {
      auto scene_rng = make_stream(seed, stream_tag::scene, static_cast<std::uint64_t>(i));
      env::Scene scene = env::draw_scene(cfg.env, cfg.geom, scene_rng);
      if (scene.alive_count() > 0) {
        auto sys = scatter::SurfaceSystem::from_scene(scene, cfg.k, cfg.k * kSpeedOfLight,
                                                      kVacuumPermeability, cfg.mom);
        // Induced-current solutions for every Tx sample and polarization.
        Eigen::MatrixXcd coeffs(sys.unknowns(), 3 * n_tx);
        for (int n = 0; n < n_tx; ++n) {
          Vec3 txp = cfg.grid.tx_points[n];
          double kk = cfg.k;
          for (int pol = 0; pol < 3; ++pol) {
            CVec3 e = CVec3::Zero();
            e(pol) = 1.0;
            swf::FieldFn incident = [txp, kk, e](const Vec3& r) -> ComplexVec3 {
              return {green::dyadic_green(r, txp, kk) * e, Basis::cartesian};
            };
            coeffs.col(3 * n + pol) = sys.solve(incident).coeff;
          }
        }
        Eigen::MatrixXcd f_a = sys.field_matrix(rx_a) * coeffs;  // 3 x (3 n_tx)
        for (int n = 0; n < n_tx; ++n) {
          double pre = cell_prefactor(cfg.grid, rx_a, cfg.grid.tx_points[n], cfg.k);
          tk_a[n] += pre * f_a.middleCols(3 * n, 3);
        }
        for (int o = 0; o < n_off; ++o) {
          Eigen::MatrixXcd f_b = sys.field_matrix(rx_a + offsets[o]) * coeffs;
          for (int n = 0; n < n_tx; ++n) {
            double pre = cell_prefactor(cfg.grid, rx_a + offsets[o], cfg.grid.tx_points[n], cfg.k);
            tk_b[o][n] += pre * f_b.middleCols(3 * n, 3);
          }
        }
      }
      // Correlations with the currents integrated out per scene.
      for (int n = 0; n < n_tx; ++n) {
        slot.pa += tk_a[n].squaredNorm();
        for (int o = 0; o < n_off; ++o) {
          slot.cross[o] += (tk_b[o][n].adjoint() * tk_a[n]).trace();
          slot.pb[o] += tk_b[o][n].squaredNorm();
        }
      }
    } else {
      // Free space: draw the currents, the randomness the estimator needs.
      auto rng = make_stream(seed, stream_tag::currents, static_cast<std::uint64_t>(i));
      std::normal_distribution<double> g;
      CVec3 e_a = CVec3::Zero();
      std::vector<CVec3> e_b(n_off, CVec3::Zero());
      for (int n = 0; n < n_tx; ++n) {
        CVec3 j;
        for (int c = 0; c < 3; ++c) j(c) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
        e_a += tk_a[n] * j;
        for (int o = 0; o < n_off; ++o) e_b[o] += tk_b[o][n] * j;
      }
      slot.pa = e_a.squaredNorm();
      for (int o = 0; o < n_off; ++o) {
        slot.cross[o] = e_b[o].dot(e_a);
        slot.pb[o] = e_b[o].squaredNorm();
      }
    }
  });

  for (int o = 0; o < n_off; ++o) {
    std::vector<cplx> vals(ensemble);
    std::vector<double> pr(ensemble), pl(ensemble);
    for (int i = 0; i < ensemble; ++i) {
      vals[i] = slots[i].cross[o];
      pr[i] = slots[i].pa;
      pl[i] = slots[i].pb[o];
    }
    double estimate = 0.0;
    auto se = jackknife_se_abs(vals, pr, pl, &estimate);
    curve.value.push_back(estimate);
    curve.se.push_back(se[0]);
  }
  return curve;
}

PatternCurve radiation_pattern(std::span<const cplx> j, const swf::RadiationOperator& op,
                               Cut cut, int resolution) {
  if (resolution < 2) throw_error(ErrorKind::config, "radiation_pattern: resolution too small");
  double lambda = 2.0 * kPi / op.k;
  double radius = op.geom.D + op.geom.R_r + 100.0 * lambda;
  PatternCurve curve;
  curve.cut = cut;
  for (int i = 0; i < resolution; ++i) {
    Spherical s;
    s.r = radius;
    if (cut == Cut::theta) {
      s.theta = kPi * i / (resolution - 1.0);
      s.phi = 0.0;
      curve.angle_deg.push_back(s.theta * 180.0 / kPi);
    } else {
      s.theta = 0.5 * kPi;
      s.phi = 2.0 * kPi * i / resolution;
      curve.angle_deg.push_back(s.phi * 180.0 / kPi);
    }
    auto e = swf::radiate(j, to_cartesian(s), op);
    curve.e_r.push_back(std::abs(e.v(0)));
    curve.e_theta.push_back(std::abs(e.v(1)));
    curve.e_phi.push_back(std::abs(e.v(2)));
  }
  return curve;
}

}  // namespace emchan::chanstats
