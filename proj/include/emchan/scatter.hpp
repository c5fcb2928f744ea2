// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <span>
#include <vector>

#include "emchan/geometry.hpp"
#include "emchan/stochastic_env.hpp"
#include "emchan/swf.hpp"

namespace emchan::scatter {

struct MomOptions {
  int basis_count = 48;   // surface-current basis functions per scatterer (degree band n <= 4)
  int match_points = 64;  // point-matching locations per scatterer
  bool te_only = false;   // restrict the basis to TE-type patterns (odd p)
  int surface_theta = 0;  // surface quadrature nodes; 0 = auto from the basis band
  int surface_phi = 0;
  double condition_limit = 1e12;
};

/// Least-squares solution of the point-matching system. The residual is
/// measured on held-out surface points that the matching system never saw.
struct SurfaceCurrentSolution {
  Eigen::VectorXcd coeff;      // one block of basis_count entries per scatterer
  double residual_abs = 0.0;   // max tangential |E_inc + E_s| on held-out points
  double residual_rel = 0.0;   // residual_abs / max tangential |E_inc| held-out
  double condition = 0.0;      // sigma_max / sigma_min of the matching matrix
  int scatterer_count = 0;
  int basis_count = 0;
};

/// Point-matching system for a fixed set of ideal-conductor spheres. Assembly
/// and factorization happen once; solving for a new incident field is a pair
/// of matrix products, so iterative transmit-current optimization can reuse
/// the factorization across rounds.
///
/// The surface-current basis on each sphere is the tangential trace of the
/// regular wave functions in scatterer-local coordinates: both the TE
/// patterns and the tangential part of the TM patterns are included by
/// default (TE alone cannot cancel the gradient-type half of the incident
/// tangential field; see MomOptions::te_only to restrict).
class SurfaceSystem {
 public:
  SurfaceSystem(std::vector<env::Scatterer> alive, double k, double omega, double mu,
                const MomOptions& opts = {});
  SurfaceSystem(SurfaceSystem&&) noexcept;
  SurfaceSystem& operator=(SurfaceSystem&&) noexcept;
  ~SurfaceSystem();

  /// Build a system from the alive scatterers of a scene.
  static SurfaceSystem from_scene(const env::Scene& scene, double k, double omega, double mu,
                                  const MomOptions& opts = {});

  bool empty() const { return scatterers_.empty(); }
  int scatterer_count() const { return static_cast<int>(scatterers_.size()); }
  int unknowns() const { return scatterer_count() * opts_.basis_count; }
  const std::vector<env::Scatterer>& scatterers() const { return scatterers_; }
  const MomOptions& options() const { return opts_; }

  /// Tangential boundary condition n x (E_inc + E_s) = 0 enforced in the
  /// least-squares sense at the match points. Incident fields may be returned
  /// in any basis; they are converted internally.
  SurfaceCurrentSolution solve(const swf::FieldFn& incident) const;

  /// Radiated field of one basis current via surface quadrature of the
  /// dyadic kernel. Field point must be strictly outside scatterer q.
  ComplexVec3 basis_field(int q, int d, const Vec3& r_field) const;

  /// (3 x unknowns) response of every basis current at a field point, and the
  /// stacked (3 n_points x unknowns) variant used to precompute user fields.
  Eigen::MatrixXcd field_matrix(const Vec3& r_field) const;
  Eigen::MatrixXcd field_matrix(std::span<const Vec3> points) const;

  /// Scattered field E_s(r) for a solved current distribution.
  ComplexVec3 scattered_field(const SurfaceCurrentSolution& sol, const Vec3& r_field) const;

 private:
  struct Block;  // per-scatterer precomputation
  void assemble();
  CVec3 incident_cartesian(const swf::FieldFn& f, const Vec3& p) const;

  std::vector<env::Scatterer> scatterers_;
  double k_, omega_, mu_;
  MomOptions opts_;
  std::vector<Block> blocks_;
  Eigen::MatrixXcd matrix_;        // (2 Q N_s) x (Q D)
  Eigen::MatrixXcd held_matrix_;   // (2 Q N_held) x (Q D)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
  double condition_ = 0.0;         // |R_00| / |R_min| estimate from the pivoted QR
};

/// Convenience wrapper matching the scene-level contract.
SurfaceCurrentSolution solve_induced_currents(const env::Scene& scene,
                                              const swf::FieldFn& incident, double k,
                                              double omega, double mu,
                                              const MomOptions& opts = {});

}  // namespace emchan::scatter
