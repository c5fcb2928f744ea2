// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "emchan/constants.hpp"
#include "emchan/geometry.hpp"
#include "emchan/quadrature.hpp"

namespace emchan::swf {

/// Mode index triple: degree n >= 1, order m in [-n, n], l = 1 (TE) or 2 (TM).
/// The flattened index p = 2(n(n+1) + m - 1) + l is a bijection onto 1, 2, ...
struct SphIndex {
  int n = 1;
  int m = 0;
  int l = 1;
};

int flatten(const SphIndex& idx);
SphIndex unflatten(int p);

/// Number of modes with degree <= n: 2 n (n + 2).
inline int mode_count(int n_trunc) { return 2 * n_trunc * (n_trunc + 2); }

enum class RadialKind {
  regular,   // spherical Bessel j_n; finite everywhere
  outgoing,  // spherical Hankel h_n^(1); singular at the origin
};

/// Evaluate every mode with degree <= n_trunc at one point. Components are in
/// the local spherical basis (r, theta, phi) of the point; out must have
/// mode_count(n_trunc) entries, stored at index p-1.
void eval_modes(const Spherical& pt, double k, int n_trunc, RadialKind kind,
                std::span<CVec3> out);

/// Outgoing wave function U_p (h_n radial kernel). r > 0 required.
ComplexVec3 eval_U(const SphIndex& idx, const Spherical& pt, double k);

/// Regular wave function V_p (j_n radial kernel). Finite at r = 0.
ComplexVec3 eval_V(const SphIndex& idx, const Spherical& pt, double k);

/// Tx/Rx ball geometry. The Tx ball of radius R_t is centered at the origin,
/// the Rx ball of radius R_r at distance D along +x.
struct SphGeometry {
  double R_t = 0.02;
  double R_r = 0.2;
  double D = 10.0;
  Vec3 rx_center() const { return Vec3(D, 0.0, 0.0); }
};

struct NormQuadOptions {
  int n_r = 0;      // 0 = auto (n_trunc + 4)
  int n_theta = 0;  // 0 = auto (n_trunc + 2)
  int n_phi = 0;    // 0 = auto (2 n_trunc + 2)
  bool verify = true;
  double verify_tol = 1e-6;  // relative change allowed when node count doubles
};

/// Truncated singular system of the source-to-field map between the two
/// balls: per-mode volume norms, singular values sigma_p = -omega mu k a_p
/// with a_p = |U_p| |V_p| / (n(n+1)), and the combined field coefficient
/// sigma_p / |U_p| used when radiating. Immutable once built.
struct RadiationOperator {
  SphGeometry geom;
  double k = 0.0;
  double omega = 0.0;
  double mu = kVacuumPermeability;
  int n_trunc = 0;
  int p_max = 0;
  std::vector<double> u_norm;      // |U_p| over the Rx ball
  std::vector<double> v_norm;      // |V_p| over the Tx ball
  std::vector<double> sigma;       // signed singular values (negative)
  std::vector<double> field_coef;  // sigma_p / u_norm_p = -omega mu k v_norm_p / (n(n+1))
  NormQuadOptions quad;            // resolved node counts actually used

  SphIndex index(int p) const { return unflatten(p); }
};

/// Standard truncation for a band limited by radius R: ceil(kR) + 10.
int default_truncation(double k, double R);

/// Build the operator by product quadrature over the two ball volumes. When
/// opts.verify is set the norms are recomputed with doubled node counts; a
/// relative change above verify_tol raises an accuracy error and the doubled
/// values are kept otherwise.
RadiationOperator normalize_modes(const SphGeometry& geom, double k, int n_trunc,
                                  NormQuadOptions opts = {});

/// Quadrature rule over the Tx ball matching the operator's node counts.
quadrature::BallRule tx_ball_rule(const RadiationOperator& op);

using FieldFn = std::function<ComplexVec3(const Vec3&)>;

/// Current expansion coefficients j_p = integral over V_t of J . conj(v_p).
std::vector<cplx> expand_current(const FieldFn& current, const RadiationOperator& op);

/// Radiated field E(r) = sum_p sigma_p j_p u_p(r), truncated at p_max.
/// Valid for |r| > R_t; returns spherical-basis components at the point.
ComplexVec3 radiate(std::span<const cplx> j, const Vec3& point, const RadiationOperator& op);

}  // namespace emchan::swf
