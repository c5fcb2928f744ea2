#include <doctest.h>

#include <cmath>

#include "emchan/channel_stats.hpp"
#include "emchan/constants.hpp"
#include "emchan/error.hpp"
#include "emchan/green.hpp"

using namespace emchan;
using namespace emchan::chanstats;

namespace {

constexpr double kWave = 2.0 * kPi;  // wavelength 1

StatsConfig small_config() {
  StatsConfig cfg;
  cfg.geom = {0.5, 1.0, 6.0};
  cfg.k = kWave;
  cfg.grid.tx_points = {Vec3::Zero()};
  cfg.grid.rx_points = {cfg.geom.rx_center()};
  cfg.grid.delta_t = {0.5, 0.5, 0.5};
  cfg.grid.delta_r = {0.5, 0.5, 0.5};
  cfg.env.scatterer_radius = 0.25;
  cfg.env.clearance = 0.1;
  cfg.env.sigma_ds = 0.7;
  cfg.env.sigma_as = 1.2;
  cfg.env.sigma_es = 0.7;
  cfg.env.mean_count = 3.0;
  cfg.mom.basis_count = 16;
  cfg.mom.match_points = 32;
  return cfg;
}

}  // namespace

TEST_SUITE("channel_stats") {

TEST_CASE("channel entry structure") {
  SampleGrid grid;
  grid.tx_points = {Vec3::Zero()};
  grid.rx_points = {Vec3(4.0, 0.0, 0.0)};
  grid.delta_t = {0.05, 0.05, 0.05};
  grid.delta_r = {0.05, 0.05, 0.05};
  Mobility still{Vec3::Zero()};

  SUBCASE("on-axis pair: transverse sinc factors are exactly 1") {
    auto e = channel_entry(grid, 0, 0, 0.0, still, FieldModel::full, kWave, CVec3(0, 0, 1));
    double r = 4.0;
    double sx = std::sin(0.5 * kWave * 4.0 * 0.05 / r) / (0.5 * kWave * 4.0 * 0.05 / r);
    Dyad expected = grid.tx_cell_volume() * grid.rx_cell_volume() * sx *
                    green::dyadic_green(grid.rx_points[0], grid.tx_points[0], kWave);
    CHECK((e.dyad - expected).norm() <= 1e-14 * expected.norm());
  }
  SUBCASE("far model annihilates the radial current") {
    auto e = channel_entry(grid, 0, 0, 0.0, still, FieldModel::far, kWave, CVec3(1, 0, 0));
    CHECK(e.h.norm() < 1e-18);  // current along the propagation axis
  }
  SUBCASE("continuum limit: volume-normalized entry stabilizes") {
    SampleGrid fine = grid;
    grid.delta_t = {0.05, 0.05, 0.05};  // lambda/20
    fine.delta_t = {0.005, 0.005, 0.005};
    auto a = channel_entry(grid, 0, 0, 0.0, still, FieldModel::full, kWave, CVec3(0, 0, 1));
    auto b = channel_entry(fine, 0, 0, 0.0, still, FieldModel::full, kWave, CVec3(0, 0, 1));
    double na = a.h.norm() / grid.tx_cell_volume() / grid.rx_cell_volume();
    double nb = b.h.norm() / fine.tx_cell_volume() / fine.rx_cell_volume();
    CHECK(std::abs(na / nb - 1.0) < 0.005);
  }
  SUBCASE("coincident samples are rejected") {
    SampleGrid bad = grid;
    bad.rx_points = {Vec3::Zero()};
    CHECK_THROWS_AS(channel_entry(bad, 0, 0, 0.0, still, FieldModel::full, kWave, CVec3(0, 0, 1)),
                    Error);
  }
}

TEST_CASE("temporal acf basics") {
  StatsConfig cfg = small_config();
  double lags[] = {0.0, 0.002, 0.005};

  SUBCASE("zero lag normalizes to one") {
    auto curve = temporal_acf(cfg, lags, 0.0, 8, 11, true);
    CHECK(curve.value[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("static free-space channel never decorrelates") {
    StatsConfig still = cfg;
    still.mobility.rx_velocity = Vec3::Zero();
    auto curve = temporal_acf(still, lags, 0.0, 1, 5, false);
    for (double v : curve.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("scattering accelerates decorrelation") {
    auto free_curve = temporal_acf(cfg, lags, 0.0, 24, 7, false);
    auto scat_curve = temporal_acf(cfg, lags, 0.0, 24, 7, true);
    CHECK(scat_curve.value.back() < free_curve.value.back());
  }
  SUBCASE("conjugate symmetry of mirrored lags in free space") {
    double fwd[] = {0.004};
    double bwd[] = {-0.004};
    auto a = temporal_acf(cfg, fwd, 0.996, 1, 3, false);
    auto b = temporal_acf(cfg, bwd, 1.000, 1, 3, false);
    CHECK(std::abs(a.corr[0] - std::conj(b.corr[0])) < 1e-12);
  }
}

TEST_CASE("spatial ccf basics") {
  StatsConfig cfg = small_config();
  std::vector<Vec3> offsets = {Vec3::Zero(), Vec3(0.0, 0.25, 0.0), Vec3(0.0, 0.5, 0.0)};
  // A few transverse Tx samples so the field has angular structure.
  cfg.grid.tx_points = lattice_in_ball(Vec3::Zero(), 0.45, 0.45);

  SUBCASE("zero offset gives one, magnitudes stay below one") {
    auto curve = spatial_ccf(cfg, offsets, 30, 21, false);
    CHECK(curve.value[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : curve.value) CHECK(v <= 1.0 + 1e-12);
    CHECK(curve.analytic[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("monte-carlo estimate matches the closed kernel within 2 se") {
    auto curve = spatial_ccf(cfg, offsets, 60, 33, false);
    for (size_t o = 1; o < offsets.size(); ++o) {
      CHECK(std::abs(curve.value[o] - curve.analytic[o]) <= 2.0 * curve.se[o] + 1e-9);
    }
  }
  SUBCASE("scattering decorrelates faster") {
    auto free_curve = spatial_ccf(cfg, offsets, 30, 9, false);
    auto scat_curve = spatial_ccf(cfg, offsets, 30, 9, true);
    CHECK(scat_curve.value.back() < free_curve.value.back());
  }
  SUBCASE("offsets outside the ball are rejected") {
    std::vector<Vec3> bad = {Vec3(0.0, 2.5, 0.0)};
    CHECK_THROWS_AS(spatial_ccf(cfg, bad, 4, 1, false), Error);
  }
}

TEST_CASE("radiation pattern far-field structure") {
  auto op = swf::normalize_modes({0.5, 1.0, 4.0}, kWave, 8, {.verify = false});
  std::vector<cplx> j(op.p_max, 0.0);
  j[0] = 1.0;  // TE mode, n = 1

  auto curve = radiation_pattern(j, op, Cut::theta, 61);
  double max_r = 0.0, max_t = 0.0;
  for (size_t i = 0; i < curve.angle_deg.size(); ++i) {
    max_r = std::max(max_r, curve.e_r[i]);
    max_t = std::max(max_t, std::hypot(curve.e_theta[i], curve.e_phi[i]));
  }
  CHECK(max_r < 1e-2 * max_t);  // transverse far field

  SUBCASE("magnitude pattern ignores a global phase") {
    std::vector<cplx> j2(op.p_max, 0.0);
    j2[0] = std::polar(1.0, 0.77);
    auto curve2 = radiation_pattern(j2, op, Cut::theta, 61);
    for (size_t i = 0; i < curve.angle_deg.size(); ++i) {
      CHECK(curve2.e_theta[i] == doctest::Approx(curve.e_theta[i]).epsilon(1e-12));
      CHECK(curve2.e_phi[i] == doctest::Approx(curve.e_phi[i]).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
