// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/swf.hpp"

#include <cmath>

#include "emchan/error.hpp"
#include "emchan/specfun.hpp"

namespace emchan::swf {

int flatten(const SphIndex& idx) {
  if (idx.n < 1 || idx.m < -idx.n || idx.m > idx.n || idx.l < 1 || idx.l > 2) {
    throw_error(ErrorKind::domain, "flatten: invalid mode index");
  }
  return 2 * (idx.n * (idx.n + 1) + idx.m - 1) + idx.l;
}

SphIndex unflatten(int p) {
  if (p < 1) throw_error(ErrorKind::domain, "unflatten: p must be >= 1");
  // Degree block for n spans [2n^2 - 1, 2n(n+2)].
  int n = static_cast<int>(std::floor(std::sqrt((p + 1) / 2.0)));
  while (2 * n * (n + 2) < p) ++n;
  while (n > 1 && 2 * n * n - 1 > p) --n;
  int l = (p % 2 == 1) ? 1 : 2;
  int m = (p - l) / 2 - n * (n + 1) + 1;
  return {n, m, l};
}

int default_truncation(double k, double R) {
  return static_cast<int>(std::ceil(k * R)) + 10;
}

namespace {

struct RadialTable {
  std::vector<cplx> z;         // z_n(kr)
  std::vector<cplx> z_over_x;  // z_n(kr) / kr
  std::vector<cplx> zeta;      // (1/x) d/dx (x z_n)  = z_{n-1} - n z_n / x
};

RadialTable radial_table(double x, int n_max, RadialKind kind) {
  RadialTable t;
  t.z.assign(n_max + 1, 0.0);
  t.z_over_x.assign(n_max + 1, 0.0);
  t.zeta.assign(n_max + 1, 0.0);
  if (kind == RadialKind::outgoing && x <= 0.0) {
    throw_error(ErrorKind::singularity, "eval_modes: outgoing kernel singular at r = 0");
  }
  if (kind == RadialKind::regular && x < 1e-14) {
    // Origin limits: j_n(0) = 0 for n >= 1, j_1(x)/x -> 1/3, zeta_1 -> 2/3.
    t.z[0] = 1.0;
    if (n_max >= 1) {
      t.z_over_x[1] = 1.0 / 3.0;
      t.zeta[1] = 2.0 / 3.0;
    }
    return t;
  }
  std::vector<double> jn;
  specfun::spherical_j_array(n_max, x, jn);
  if (kind == RadialKind::regular) {
    for (int n = 0; n <= n_max; ++n) t.z[n] = jn[n];
  } else {
    std::vector<double> yn;
    specfun::spherical_y_array(n_max, x, yn);
    for (int n = 0; n <= n_max; ++n) t.z[n] = cplx(jn[n], yn[n]);
  }
  for (int n = 0; n <= n_max; ++n) t.z_over_x[n] = t.z[n] / x;
  for (int n = 1; n <= n_max; ++n) t.zeta[n] = t.z[n - 1] - static_cast<double>(n) * t.z_over_x[n];
  return t;
}

}  // namespace

void eval_modes(const Spherical& pt, double k, int n_trunc, RadialKind kind,
                std::span<CVec3> out) {
  int p_max = mode_count(n_trunc);
  if (static_cast<int>(out.size()) < p_max) {
    throw_error(ErrorKind::config, "eval_modes: output span too small");
  }
  double x = k * pt.r;
  RadialTable rad = radial_table(x, n_trunc, kind);
  specfun::LegendreTable leg = specfun::legendre_table(n_trunc, pt.theta);

  std::vector<cplx> eimphi(n_trunc + 1);
  for (int m = 0; m <= n_trunc; ++m) eimphi[m] = std::polar(1.0, m * pt.phi);

  for (int p = 1; p <= p_max; ++p) {
    SphIndex idx = unflatten(p);
    int mm = std::abs(idx.m);
    cplx phase = (idx.m >= 0) ? eimphi[mm] : std::conj(eimphi[mm]);
    double pbar = leg.p[leg.idx(mm, idx.n)];
    double dpbar = leg.dp[leg.idx(mm, idx.n)];
    double pos = leg.p_over_sin[leg.idx(mm, idx.n)];
    cplx im_pos = cplx(0.0, static_cast<double>(idx.m)) * pos * phase;
    cplx dp_ph = dpbar * phase;
    CVec3& o = out[p - 1];
    if (idx.l == 1) {
      o(0) = 0.0;
      o(1) = rad.z[idx.n] * im_pos;
      o(2) = -rad.z[idx.n] * dp_ph;
    } else {
      double nn1 = static_cast<double>(idx.n) * (idx.n + 1);
      o(0) = nn1 * rad.z_over_x[idx.n] * pbar * phase;
      o(1) = rad.zeta[idx.n] * dp_ph;
      o(2) = rad.zeta[idx.n] * im_pos;
    }
  }
}

ComplexVec3 eval_U(const SphIndex& idx, const Spherical& pt, double k) {
  int p = flatten(idx);
  std::vector<CVec3> buf(mode_count(idx.n));
  eval_modes(pt, k, idx.n, RadialKind::outgoing, buf);
  return {buf[p - 1], Basis::spherical};
}

ComplexVec3 eval_V(const SphIndex& idx, const Spherical& pt, double k) {
  int p = flatten(idx);
  std::vector<CVec3> buf(mode_count(idx.n));
  eval_modes(pt, k, idx.n, RadialKind::regular, buf);
  return {buf[p - 1], Basis::spherical};
}

namespace {

NormQuadOptions resolve_quad(const NormQuadOptions& opts, int n_trunc) {
  NormQuadOptions q = opts;
  if (q.n_r <= 0) q.n_r = n_trunc + 4;
  if (q.n_theta <= 0) q.n_theta = n_trunc + 2;
  if (q.n_phi <= 0) q.n_phi = 2 * n_trunc + 2;
  return q;
}

// Accumulates |mode|^2 over a ball rule; points are global, modes evaluated
// in global spherical coordinates.
std::vector<double> mode_norms(const quadrature::BallRule& rule, double k, int n_trunc,
                               RadialKind kind) {
  int p_max = mode_count(n_trunc);
  std::vector<double> acc(p_max, 0.0);
  std::vector<CVec3> buf(p_max);
  for (size_t i = 0; i < rule.points.size(); ++i) {
    Spherical s = to_spherical(rule.points[i]);
    eval_modes(s, k, n_trunc, kind, buf);
    double w = rule.weights[i];
    for (int p = 0; p < p_max; ++p) acc[p] += w * buf[p].squaredNorm();
  }
  for (auto& a : acc) a = std::sqrt(a);
  return acc;
}

}  // namespace

RadiationOperator normalize_modes(const SphGeometry& geom, double k, int n_trunc,
                                  NormQuadOptions opts) {
  if (geom.R_t <= 0.0 || geom.R_r <= 0.0 || n_trunc < 1) {
    throw_error(ErrorKind::config, "normalize_modes: need R_t > 0, R_r > 0, n_trunc >= 1");
  }
  NormQuadOptions q = resolve_quad(opts, n_trunc);
  RadiationOperator op;
  op.geom = geom;
  op.k = k;
  op.omega = k * kSpeedOfLight;
  op.n_trunc = n_trunc;
  op.p_max = mode_count(n_trunc);
  op.quad = q;

  auto compute = [&](int n_r, int n_th, int n_ph) {
    auto tx = quadrature::ball_rule(Vec3::Zero(), geom.R_t, n_r, n_th, n_ph);
    auto rx = quadrature::ball_rule(geom.rx_center(), geom.R_r, n_r, n_th, n_ph);
    return std::make_pair(mode_norms(tx, k, n_trunc, RadialKind::regular),
                          mode_norms(rx, k, n_trunc, RadialKind::outgoing));
  };

  auto [v0, u0] = compute(q.n_r, q.n_theta, q.n_phi);
  if (q.verify) {
    auto [v1, u1] = compute(2 * q.n_r, 2 * q.n_theta, 2 * q.n_phi);
    for (int p = 0; p < op.p_max; ++p) {
      double dv = std::abs(v1[p] - v0[p]) / v1[p];
      double du = std::abs(u1[p] - u0[p]) / u1[p];
      if (dv > q.verify_tol || du > q.verify_tol) {
        throw_error(ErrorKind::accuracy,
                    "normalize_modes: volume-norm quadrature did not converge at p = " +
                        std::to_string(p + 1));
      }
    }
    v0 = std::move(v1);
    u0 = std::move(u1);
  }

  op.v_norm = std::move(v0);
  op.u_norm = std::move(u0);
  op.sigma.resize(op.p_max);
  op.field_coef.resize(op.p_max);
  for (int p = 1; p <= op.p_max; ++p) {
    SphIndex idx = unflatten(p);
    double nn1 = static_cast<double>(idx.n) * (idx.n + 1);
    double a_p = op.u_norm[p - 1] * op.v_norm[p - 1] / nn1;
    op.sigma[p - 1] = -op.omega * op.mu * k * a_p;
    op.field_coef[p - 1] = -op.omega * op.mu * k * op.v_norm[p - 1] / nn1;
    if (!std::isfinite(op.sigma[p - 1]) || op.sigma[p - 1] == 0.0) {
      throw_error(ErrorKind::accuracy, "normalize_modes: non-finite or zero singular value");
    }
  }
  return op;
}

quadrature::BallRule tx_ball_rule(const RadiationOperator& op) {
  return quadrature::ball_rule(Vec3::Zero(), op.geom.R_t, op.quad.n_r, op.quad.n_theta,
                               op.quad.n_phi);
}

std::vector<cplx> expand_current(const FieldFn& current, const RadiationOperator& op) {
  auto rule = tx_ball_rule(op);
  std::vector<cplx> coeff(op.p_max, 0.0);
  std::vector<CVec3> buf(op.p_max);
  for (size_t i = 0; i < rule.points.size(); ++i) {
    Spherical s = to_spherical(rule.points[i]);
    eval_modes(s, op.k, op.n_trunc, RadialKind::regular, buf);
    ComplexVec3 j_here = to_spherical(current(rule.points[i]), s);
    double w = rule.weights[i];
    for (int p = 0; p < op.p_max; ++p) {
      coeff[p] += w * buf[p].dot(j_here.v);  // dot conjugates the left factor
    }
  }
  for (int p = 0; p < op.p_max; ++p) coeff[p] /= op.v_norm[p];
  return coeff;
}

ComplexVec3 radiate(std::span<const cplx> j, const Vec3& point, const RadiationOperator& op) {
  Spherical s = to_spherical(point);
  if (s.r <= op.geom.R_t) {
    throw_error(ErrorKind::domain, "radiate: expansion is valid only for r > R_t");
  }
  int p_count = std::min<int>(op.p_max, static_cast<int>(j.size()));
  std::vector<CVec3> buf(op.p_max);
  eval_modes(s, op.k, op.n_trunc, RadialKind::outgoing, buf);
  CVec3 e = CVec3::Zero();
  for (int p = 0; p < p_count; ++p) {
    if (j[p] != 0.0) e += (op.field_coef[p] * j[p]) * buf[p];
  }
  return {e, Basis::spherical};
}

}  // namespace emchan::swf
