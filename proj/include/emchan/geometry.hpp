// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace emchan {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Dyad = Eigen::Matrix3cd;  // Cartesian basis unless stated otherwise
using cplx = std::complex<double>;

/// Point in the standard spherical convention: theta is the polar angle
/// measured from +z in [0, pi], phi is the azimuth from +x in [0, 2pi).
struct Spherical {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

inline Spherical to_spherical(const Vec3& p) {
  Spherical s;
  s.r = p.norm();
  if (s.r == 0.0) return s;
  s.theta = std::acos(std::clamp(p.z() / s.r, -1.0, 1.0));
  s.phi = std::atan2(p.y(), p.x());
  if (s.phi < 0.0) s.phi += 2.0 * 3.14159265358979323846;
  return s;
}

inline Vec3 to_cartesian(const Spherical& s) {
  double st = std::sin(s.theta), ct = std::cos(s.theta);
  return Vec3(s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi), s.r * ct);
}

/// Local orthonormal spherical axes (r_hat, theta_hat, phi_hat) at direction
/// (theta, phi). Degenerate at the poles where phi is arbitrary; callers pass
/// whatever phi they carried, which keeps the frame orthonormal.
inline void spherical_axes(double theta, double phi, Vec3& er, Vec3& eth, Vec3& eph) {
  double st = std::sin(theta), ct = std::cos(theta);
  double cp = std::cos(phi), sp = std::sin(phi);
  er = Vec3(st * cp, st * sp, ct);
  eth = Vec3(ct * cp, ct * sp, -st);
  eph = Vec3(-sp, cp, 0.0);
}

enum class Basis { cartesian, spherical };

/// One field or current-density sample: three complex components plus the
/// basis they are expressed in. Spherical components are (E_r, E_theta, E_phi)
/// in the local frame of the point they were evaluated at.
struct ComplexVec3 {
  CVec3 v = CVec3::Zero();
  Basis basis = Basis::cartesian;
};

inline CVec3 spherical_to_cartesian(const CVec3& f, double theta, double phi) {
  Vec3 er, eth, eph;
  spherical_axes(theta, phi, er, eth, eph);
  return f(0) * er.cast<cplx>() + f(1) * eth.cast<cplx>() + f(2) * eph.cast<cplx>();
}

inline CVec3 cartesian_to_spherical(const CVec3& f, double theta, double phi) {
  Vec3 er, eth, eph;
  spherical_axes(theta, phi, er, eth, eph);
  return CVec3(er.cast<cplx>().dot(f), eth.cast<cplx>().dot(f), eph.cast<cplx>().dot(f));
}

inline ComplexVec3 to_cartesian(const ComplexVec3& f, const Spherical& at) {
  if (f.basis == Basis::cartesian) return f;
  return {spherical_to_cartesian(f.v, at.theta, at.phi), Basis::cartesian};
}

inline ComplexVec3 to_spherical(const ComplexVec3& f, const Spherical& at) {
  if (f.basis == Basis::spherical) return f;
  return {cartesian_to_spherical(f.v, at.theta, at.phi), Basis::spherical};
}

}  // namespace emchan
