// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/scatter.hpp"

#include <cmath>

#include "emchan/error.hpp"
#include "emchan/green.hpp"
#include "emchan/quadrature.hpp"
#include "emchan/specfun.hpp"

namespace emchan::scatter {

namespace {

// Normalized tangential pattern of mode (n, m, l) at local angles: the TE
// (curl-type) family for l = 1, the tangential trace of the TM family for
// l = 2. Components on (theta_hat, phi_hat), unit L2 norm over the sphere.
void tangential_pattern(const specfun::LegendreTable& leg, const swf::SphIndex& idx, double phi,
                        cplx& e_theta, cplx& e_phi) {
  int mm = std::abs(idx.m);
  cplx ph = std::polar(1.0, idx.m * phi);
  double inv = 1.0 / std::sqrt(static_cast<double>(idx.n) * (idx.n + 1));
  cplx im_pos = cplx(0.0, static_cast<double>(idx.m)) * leg.p_over_sin[leg.idx(mm, idx.n)] * ph;
  cplx dp = leg.dp[leg.idx(mm, idx.n)] * ph;
  if (idx.l == 1) {
    e_theta = inv * im_pos;
    e_phi = -inv * dp;
  } else {
    e_theta = inv * dp;
    e_phi = inv * im_pos;
  }
}

}  // namespace

struct SurfaceSystem::Block {
  std::vector<Vec3> match_pts, held_pts;
  std::vector<Spherical> match_loc, held_loc;  // r = radius, local angles
  std::vector<Vec3> surf_pts;                  // absolute quadrature nodes
  Eigen::MatrixXcd radiator;                   // (3 n_surf) x D, weights and i omega mu folded in
  std::vector<swf::SphIndex> modes;
  std::vector<cplx> self_alpha;   // tangential self-trace coefficient
  std::vector<cplx> out_coef;     // closed-form external coefficient (used by tests)
  int n_band = 0;
};

SurfaceSystem::SurfaceSystem(SurfaceSystem&&) noexcept = default;
SurfaceSystem& SurfaceSystem::operator=(SurfaceSystem&&) noexcept = default;
SurfaceSystem::~SurfaceSystem() = default;

SurfaceSystem SurfaceSystem::from_scene(const env::Scene& scene, double k, double omega,
                                        double mu, const MomOptions& opts) {
  std::vector<env::Scatterer> alive;
  for (const auto& s : scene.scatterers) {
    if (s.alive) alive.push_back(s);
  }
  return SurfaceSystem(std::move(alive), k, omega, mu, opts);
}

SurfaceSystem::SurfaceSystem(std::vector<env::Scatterer> alive, double k, double omega, double mu,
                             const MomOptions& opts)
    : scatterers_(std::move(alive)), k_(k), omega_(omega), mu_(mu), opts_(opts) {
  for (const auto& s : scatterers_) {
    if (!s.alive) throw_error(ErrorKind::config, "SurfaceSystem: all scatterers must be alive");
    if (s.radius <= 0.0) throw_error(ErrorKind::config, "SurfaceSystem: radius must be positive");
  }
  if (2 * opts_.match_points < opts_.basis_count) {
    throw_error(ErrorKind::config,
                "SurfaceSystem: match_points too small; need 2 N_s >= basis_count per scatterer");
  }
  if (!scatterers_.empty()) assemble();
}

void SurfaceSystem::assemble() {
  const int q_count = scatterer_count();
  const int d_count = opts_.basis_count;
  const int n_s = opts_.match_points;

  auto match_dirs = quadrature::fibonacci_sphere(n_s, false);
  auto held_dirs = quadrature::fibonacci_sphere(n_s, true);

  blocks_.resize(q_count);
  for (int q = 0; q < q_count; ++q) {
    Block& blk = blocks_[q];
    const auto& sc = scatterers_[q];
    blk.modes.resize(d_count);
    for (int d = 0; d < d_count; ++d) {
      int p = opts_.te_only ? (2 * d + 1) : (d + 1);
      blk.modes[d] = swf::unflatten(p);
      blk.n_band = std::max(blk.n_band, blk.modes[d].n);
    }
    double ka = k_ * sc.radius;
    std::vector<double> jn, yn;
    specfun::spherical_j_array(blk.n_band, ka, jn);
    specfun::spherical_y_array(blk.n_band, ka, yn);
    blk.self_alpha.resize(d_count);
    blk.out_coef.resize(d_count);
    double scale = -omega_ * mu_ * k_ * sc.radius * sc.radius;
    for (int d = 0; d < d_count; ++d) {
      const auto& m = blk.modes[d];
      cplx hn(jn[m.n], yn[m.n]);
      cplx c_j, c_h;
      if (m.l == 1) {
        c_j = jn[m.n];
        c_h = hn;
      } else {
        c_j = jn[m.n - 1] - static_cast<double>(m.n) * jn[m.n] / ka;
        cplx hm1(jn[m.n - 1], yn[m.n - 1]);
        c_h = hm1 - static_cast<double>(m.n) * hn / ka;
      }
      blk.self_alpha[d] = scale * c_j * c_h;
      blk.out_coef[d] = scale * c_j;
    }

    blk.match_pts.reserve(n_s);
    blk.match_loc.reserve(n_s);
    for (const auto& dir : match_dirs) {
      blk.match_pts.push_back(sc.center + sc.radius * dir);
      blk.match_loc.push_back(to_spherical(sc.radius * dir));
    }
    blk.held_pts.reserve(n_s);
    blk.held_loc.reserve(n_s);
    for (const auto& dir : held_dirs) {
      blk.held_pts.push_back(sc.center + sc.radius * dir);
      blk.held_loc.push_back(to_spherical(sc.radius * dir));
    }

    int n_th = opts_.surface_theta > 0 ? opts_.surface_theta
                                       : std::max(12, blk.n_band + 6 + static_cast<int>(std::ceil(ka)));
    int n_ph = opts_.surface_phi > 0 ? opts_.surface_phi : 2 * n_th;
    auto rule = quadrature::sphere_rule(n_th, n_ph);
    int n_nodes = static_cast<int>(rule.nodes.size());
    blk.surf_pts.resize(n_nodes);
    blk.radiator.resize(3 * n_nodes, d_count);
    cplx jwm(0.0, omega_ * mu_);
    for (int s = 0; s < n_nodes; ++s) {
      const auto& nd = rule.nodes[s];
      Spherical loc{sc.radius, nd.theta, nd.phi};
      blk.surf_pts[s] = sc.center + to_cartesian(loc);
      auto leg = specfun::legendre_table(blk.n_band, nd.theta);
      double w = nd.weight * sc.radius * sc.radius;  // dS = a^2 dOmega
      for (int d = 0; d < d_count; ++d) {
        cplx eth, eph;
        tangential_pattern(leg, blk.modes[d], nd.phi, eth, eph);
        CVec3 cart = spherical_to_cartesian(CVec3(0.0, eth, eph), nd.theta, nd.phi);
        blk.radiator.block<3, 1>(3 * s, d) = jwm * w * cart;
      }
    }
  }

  // Matching and held-out matrices.
  const int rows = 2 * q_count * n_s;
  const int cols = q_count * d_count;
  matrix_.setZero(rows, cols);
  held_matrix_.setZero(rows, cols);

  auto fill_rows = [&](int q, const std::vector<Vec3>& pts, const std::vector<Spherical>& locs,
                       Eigen::MatrixXcd& target) {
    for (int i = 0; i < n_s; ++i) {
      int row = 2 * (q * n_s + i);
      Vec3 er, eth, eph;
      spherical_axes(locs[i].theta, locs[i].phi, er, eth, eph);
      for (int q2 = 0; q2 < q_count; ++q2) {
        const Block& src = blocks_[q2];
        if (q2 == q) {
          auto leg = specfun::legendre_table(src.n_band, locs[i].theta);
          for (int d = 0; d < d_count; ++d) {
            cplx pth, pph;
            tangential_pattern(leg, src.modes[d], locs[i].phi, pth, pph);
            target(row, q2 * d_count + d) = src.self_alpha[d] * pth;
            target(row + 1, q2 * d_count + d) = src.self_alpha[d] * pph;
          }
        } else {
          int n_nodes = static_cast<int>(src.surf_pts.size());
          Eigen::MatrixXcd g(3, 3 * n_nodes);
          for (int s = 0; s < n_nodes; ++s) {
            g.block<3, 3>(0, 3 * s) = green::dyadic_green(pts[i], src.surf_pts[s], k_);
          }
          Eigen::MatrixXcd field = g * src.radiator;  // 3 x D
          for (int d = 0; d < d_count; ++d) {
            CVec3 f = field.col(d);
            target(row, q2 * d_count + d) = eth.cast<cplx>().dot(f);
            target(row + 1, q2 * d_count + d) = eph.cast<cplx>().dot(f);
          }
        }
      }
    }
  };

  for (int q = 0; q < q_count; ++q) {
    fill_rows(q, blocks_[q].match_pts, blocks_[q].match_loc, matrix_);
    fill_rows(q, blocks_[q].held_pts, blocks_[q].held_loc, held_matrix_);
  }

  qr_.compute(matrix_);
  Eigen::VectorXd rdiag = qr_.matrixR().diagonal().cwiseAbs();
  condition_ = rdiag(0) / std::max(rdiag(rdiag.size() - 1), 1e-300);
}

CVec3 SurfaceSystem::incident_cartesian(const swf::FieldFn& f, const Vec3& p) const {
  ComplexVec3 v = f(p);
  if (v.basis == Basis::cartesian) return v.v;
  Spherical s = to_spherical(p);
  return spherical_to_cartesian(v.v, s.theta, s.phi);
}

SurfaceCurrentSolution SurfaceSystem::solve(const swf::FieldFn& incident) const {
  SurfaceCurrentSolution sol;
  sol.scatterer_count = scatterer_count();
  sol.basis_count = opts_.basis_count;
  if (empty()) return sol;
  if (condition_ > opts_.condition_limit) {
    throw_error(ErrorKind::ill_conditioned,
                "solve_induced_currents: matching system condition " +
                    std::to_string(condition_) + " exceeds the configured limit");
  }

  const int n_s = opts_.match_points;
  Eigen::VectorXcd rhs(matrix_.rows());
  for (int q = 0; q < scatterer_count(); ++q) {
    const Block& blk = blocks_[q];
    for (int i = 0; i < n_s; ++i) {
      int row = 2 * (q * n_s + i);
      Vec3 er, eth, eph;
      spherical_axes(blk.match_loc[i].theta, blk.match_loc[i].phi, er, eth, eph);
      CVec3 e = incident_cartesian(incident, blk.match_pts[i]);
      rhs(row) = -eth.cast<cplx>().dot(e);
      rhs(row + 1) = -eph.cast<cplx>().dot(e);
    }
  }
  sol.coeff = qr_.solve(rhs);
  sol.condition = condition_;

  double max_total = 0.0, max_inc = 0.0;
  Eigen::VectorXcd held_sc = held_matrix_ * sol.coeff;
  for (int q = 0; q < scatterer_count(); ++q) {
    const Block& blk = blocks_[q];
    for (int i = 0; i < n_s; ++i) {
      int row = 2 * (q * n_s + i);
      Vec3 er, eth, eph;
      spherical_axes(blk.held_loc[i].theta, blk.held_loc[i].phi, er, eth, eph);
      CVec3 e = incident_cartesian(incident, blk.held_pts[i]);
      cplx t0 = eth.cast<cplx>().dot(e), t1 = eph.cast<cplx>().dot(e);
      max_inc = std::max(max_inc, std::sqrt(std::norm(t0) + std::norm(t1)));
      cplx s0 = t0 + held_sc(row), s1 = t1 + held_sc(row + 1);
      max_total = std::max(max_total, std::sqrt(std::norm(s0) + std::norm(s1)));
    }
  }
  sol.residual_abs = max_total;
  sol.residual_rel = (max_inc > 0.0) ? max_total / max_inc : 0.0;
  return sol;
}

Eigen::MatrixXcd SurfaceSystem::field_matrix(const Vec3& r_field) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(3, unknowns());
  for (int q = 0; q < scatterer_count(); ++q) {
    const Block& blk = blocks_[q];
    double gap = (r_field - scatterers_[q].center).norm();
    if (gap <= scatterers_[q].radius) {
      throw_error(ErrorKind::domain, "field point on or inside a scatterer");
    }
    int n_nodes = static_cast<int>(blk.surf_pts.size());
    Eigen::MatrixXcd g(3, 3 * n_nodes);
    for (int s = 0; s < n_nodes; ++s) {
      g.block<3, 3>(0, 3 * s) = green::dyadic_green(r_field, blk.surf_pts[s], k_);
    }
    out.middleCols(q * opts_.basis_count, opts_.basis_count) = g * blk.radiator;
  }
  return out;
}

Eigen::MatrixXcd SurfaceSystem::field_matrix(std::span<const Vec3> points) const {
  Eigen::MatrixXcd out(3 * points.size(), unknowns());
  for (size_t i = 0; i < points.size(); ++i) {
    out.middleRows(3 * i, 3) = field_matrix(points[i]);
  }
  return out;
}

ComplexVec3 SurfaceSystem::basis_field(int q, int d, const Vec3& r_field) const {
  if (q < 0 || q >= scatterer_count() || d < 0 || d >= opts_.basis_count) {
    throw_error(ErrorKind::config, "basis_field: index out of range");
  }
  const Block& blk = blocks_[q];
  double gap = (r_field - scatterers_[q].center).norm();
  if (gap <= scatterers_[q].radius) {
    throw_error(ErrorKind::domain, "basis_field: field point on or inside the scatterer");
  }
  int n_nodes = static_cast<int>(blk.surf_pts.size());
  CVec3 acc = CVec3::Zero();
  for (int s = 0; s < n_nodes; ++s) {
    acc += green::dyadic_green(r_field, blk.surf_pts[s], k_) * CVec3(blk.radiator.block<3, 1>(3 * s, d));
  }
  return {acc, Basis::cartesian};
}

ComplexVec3 SurfaceSystem::scattered_field(const SurfaceCurrentSolution& sol,
                                           const Vec3& r_field) const {
  if (empty() || sol.coeff.size() == 0) return {CVec3::Zero(), Basis::cartesian};
  if (sol.coeff.size() != unknowns()) {
    throw_error(ErrorKind::config, "scattered_field: solution does not match this system");
  }
  CVec3 e = field_matrix(r_field) * sol.coeff;
  return {e, Basis::cartesian};
}

SurfaceCurrentSolution solve_induced_currents(const env::Scene& scene,
                                              const swf::FieldFn& incident, double k,
                                              double omega, double mu, const MomOptions& opts) {
  return SurfaceSystem::from_scene(scene, k, omega, mu, opts).solve(incident);
}

}  // namespace emchan::scatter
