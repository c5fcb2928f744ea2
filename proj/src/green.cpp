// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/green.hpp"

#include <cmath>

#include "emchan/constants.hpp"
#include "emchan/error.hpp"

namespace emchan::green {

cplx scalar_green(const Vec3& r_field, const Vec3& r_source, double k) {
  double r = (r_field - r_source).norm();
  if (r == 0.0) throw_error(ErrorKind::singularity, "scalar_green: coincident points");
  return std::polar(1.0 / (4.0 * kPi * r), k * r);
}

Dyad dyadic_green(const Vec3& r_field, const Vec3& r_source, double k, Part part) {
  Vec3 d = r_field - r_source;
  double r = d.norm();
  if (r == 0.0) throw_error(ErrorKind::singularity, "dyadic_green: coincident points");
  Vec3 rhat = d / r;
  Eigen::Matrix3d rr = rhat * rhat.transpose();
  Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  cplx g = std::polar(1.0 / (4.0 * kPi * r), k * r);
  double kr = k * r;
  cplx i_over_kr(0.0, 1.0 / kr);
  double inv_kr2 = 1.0 / (kr * kr);
  switch (part) {
    case Part::full: {
      cplx ci = 1.0 + i_over_kr - inv_kr2;
      cplx cr = -1.0 - 3.0 * i_over_kr + 3.0 * inv_kr2;
      return (ci * eye.cast<cplx>() + cr * rr.cast<cplx>()) * g;
    }
    case Part::far:
      return (eye - rr).cast<cplx>() * g;
    case Part::middle:
      return i_over_kr * (eye - 3.0 * rr).cast<cplx>() * g;
    case Part::near_field:
      return -inv_kr2 * (eye - 3.0 * rr).cast<cplx>() * g;
  }
  throw_error(ErrorKind::internal, "dyadic_green: unreachable");
}

ComplexVec3 radiated_field_integral(const swf::FieldFn& current, const Vec3& r_field,
                                    double k, const quadrature::BallRule& tx_rule,
                                    double omega, double mu) {
  double support = 0.0;
  for (const auto& p : tx_rule.points) support = std::max(support, (p - tx_rule.center).norm());
  if ((r_field - tx_rule.center).norm() <= support) {
    throw_error(ErrorKind::singularity,
                "radiated_field_integral: field point inside the source quadrature support");
  }
  CVec3 acc = CVec3::Zero();
  for (size_t i = 0; i < tx_rule.points.size(); ++i) {
    const Vec3& src = tx_rule.points[i];
    ComplexVec3 j = current(src);
    CVec3 j_cart;
    if (j.basis == Basis::cartesian) {
      j_cart = j.v;
    } else {
      Spherical s = to_spherical(src);
      j_cart = spherical_to_cartesian(j.v, s.theta, s.phi);
    }
    acc += tx_rule.weights[i] * (dyadic_green(r_field, src, k) * j_cart);
  }
  return {cplx(0.0, 1.0) * omega * mu * acc, Basis::cartesian};
}

}  // namespace emchan::green
