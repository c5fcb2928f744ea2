#include <doctest.h>

#include <cmath>
#include <random>

#include "emchan/constants.hpp"
#include "emchan/error.hpp"
#include "emchan/green.hpp"

using namespace emchan;
using namespace emchan::green;

TEST_SUITE("green") {

TEST_CASE("scalar kernel closed form") {
  Vec3 a(1.0, 0.0, 0.0), o = Vec3::Zero();
  CHECK(std::abs(scalar_green(a, o, 3.7)) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));
  // Phase wraps to +1 after one wavelength.
  double k = 2.0 * kPi;
  cplx g = scalar_green(Vec3(1.0, 0, 0), o, k);
  CHECK(std::arg(g) == doctest::Approx(0.0).epsilon(1e-12));
  // 1/r law.
  CHECK(std::abs(scalar_green(Vec3(2, 0, 0), o, k)) ==
        doctest::Approx(2.0 * std::abs(scalar_green(Vec3(4, 0, 0), o, k))).epsilon(1e-14));
  CHECK_THROWS_AS(scalar_green(o, o, k), Error);
}

TEST_CASE("dyadic kernel structure") {
  Vec3 o = Vec3::Zero();
  double k = 2.0;
  Vec3 rf(0.0, 0.0, 1.4);
  CVec3 radial = Vec3(0, 0, 1).cast<cplx>();
  SUBCASE("far part annihilates radial currents") {
    CVec3 e = dyadic_green(rf, o, k, Part::far) * radial;
    CHECK(e.norm() < 1e-16);
  }
  SUBCASE("near part eigenstructure of I - 3 rr") {
    CVec3 er = dyadic_green(rf, o, k, Part::near_field) * radial;
    CVec3 et = dyadic_green(rf, o, k, Part::near_field) * Vec3(1, 0, 0).cast<cplx>();
    CHECK(er.norm() == doctest::Approx(2.0 * et.norm()).epsilon(1e-13));
  }
  SUBCASE("decomposition is exact") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 1000; ++trial) {
      Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
      if ((a - b).norm() < 1e-3) continue;
      Dyad full = dyadic_green(a, b, k);
      Dyad sum = dyadic_green(a, b, k, Part::far) + dyadic_green(a, b, k, Part::middle) +
                 dyadic_green(a, b, k, Part::near_field);
      CHECK((full - sum).norm() <= 1e-14 * full.norm());
    }
  }
  SUBCASE("reciprocity") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
      Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
      if ((a - b).norm() < 1e-3) continue;
      Dyad ab = dyadic_green(a, b, k);
      Dyad ba = dyadic_green(b, a, k);
      CHECK((ab - ba.transpose()).norm() <= 1e-14 * ab.norm());
    }
  }
  SUBCASE("middle over far vanishes at large kr") {
    Vec3 dir(0.2, 0.5, 0.84);
    dir.normalize();
    double r1 = 1e2, r2 = 1e3;
    double m1 = dyadic_green(r1 * dir, o, 1.0, Part::middle).norm() /
                dyadic_green(r1 * dir, o, 1.0, Part::far).norm();
    double m2 = dyadic_green(r2 * dir, o, 1.0, Part::middle).norm() /
                dyadic_green(r2 * dir, o, 1.0, Part::far).norm();
    CHECK(std::abs(m1 / m2 - 10.0) < 1.0);  // ratio scales as 1/kr within 10%
  }
}

TEST_CASE("radiated field integral behaves like a source") {
  double k = 2.0 * kPi;
  double omega = k * kSpeedOfLight, mu = kVacuumPermeability;
  double R = 0.05;  // electrically small ball
  auto rule = quadrature::ball_rule(Vec3::Zero(), R, 6, 6, 12);

  swf::FieldFn zero = [](const Vec3&) { return ComplexVec3{}; };
  auto z_current = [](const Vec3&) {
    return ComplexVec3{CVec3(0.0, 0.0, 1.0), Basis::cartesian};
  };

  SUBCASE("zero current gives zero field") {
    auto e = radiated_field_integral(zero, Vec3(1, 1, 1), k, rule, omega, mu);
    CHECK(e.v.norm() == 0.0);
  }
  SUBCASE("far field decays as 1/r") {
    Vec3 dir(1.0, 0.4, 0.2);
    dir.normalize();
    double r1 = 20.0, r2 = 40.0;  // kr > 100
    auto e1 = radiated_field_integral(z_current, r1 * dir, k, rule, omega, mu);
    auto e2 = radiated_field_integral(z_current, r2 * dir, k, rule, omega, mu);
    CHECK(std::abs(e1.v.norm() / e2.v.norm() - 2.0) < 0.02);
  }
  SUBCASE("hertzian dipole pattern") {
    // |E| of a z-directed small source follows sin(theta) in the far zone.
    double r = 10.0;  // kr ~ 63
    auto at = [&](double theta) {
      Vec3 p(r * std::sin(theta), 0.0, r * std::cos(theta));
      return radiated_field_integral(z_current, p, k, rule, omega, mu).v.norm();
    };
    double e90 = at(kPi / 2);
    for (double theta : {0.35, 0.8, 1.2, 2.0, 2.6}) {
      CHECK(at(theta) == doctest::Approx(e90 * std::sin(theta)).epsilon(0.02));
    }
  }
  SUBCASE("field point inside the support is rejected") {
    CHECK_THROWS_AS(radiated_field_integral(z_current, Vec3(0.01, 0, 0), k, rule, omega, mu),
                    Error);
  }
}

}  // TEST_SUITE
