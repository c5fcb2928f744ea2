// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include "emchan/geometry.hpp"
#include "emchan/quadrature.hpp"
#include "emchan/swf.hpp"

namespace emchan::green {

/// Scalar free-space kernel e^{ikr} / (4 pi r).
cplx scalar_green(const Vec3& r_field, const Vec3& r_source, double k);

enum class Part { full, far, middle, near_field };

/// Free-space dyadic kernel (I + grad grad / k^2) g, Cartesian basis.
/// The far (1/r), middle (1/r^2) and near (1/r^3) parts carry the scalar
/// kernel's 1/(4 pi) prefactor so that far + middle + near == full exactly.
Dyad dyadic_green(const Vec3& r_field, const Vec3& r_source, double k, Part part = Part::full);

/// Radiated field E(r) = i omega mu * integral over V_t of G(r, r') J(r'),
/// evaluated by ball quadrature. The field point must lie outside the source
/// ball; this is the module-independent oracle for the spherical-wave path.
ComplexVec3 radiated_field_integral(const swf::FieldFn& current, const Vec3& r_field,
                                    double k, const quadrature::BallRule& tx_rule,
                                    double omega, double mu);

}  // namespace emchan::green
