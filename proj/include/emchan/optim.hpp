// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emchan/geometry.hpp"
#include "emchan/scatter.hpp"
#include "emchan/stochastic_env.hpp"
#include "emchan/swf.hpp"

namespace emchan::optim {

/// One served user: position, target symbol and the tri-polarization gains
/// applied to the (r, theta, phi) field components at the user.
struct UserTarget {
  Vec3 position = Vec3::Zero();
  cplx symbol = 1.0;
  CVec3 w = CVec3::Constant(1.0 / std::sqrt(3.0));
};

/// Per-user transfer rows: row k maps mode coefficients to the scalar
/// observation b_k^T j at user k.
using BeamMatrix = Eigen::MatrixXcd;

/// b_k[p] = sigma_p (w_r u_{r,p} + w_theta u_{theta,p} + w_phi u_{phi,p})
/// evaluated at the user position, for p = 1..P.
BeamMatrix build_beam_vectors(std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, int P);

/// Same rows over an explicit mode subset (1-based flattened indices).
BeamMatrix build_beam_vectors(std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, std::span<const int> modes);

/// The P retained items of the singular system: mode indices sorted by
/// |sigma_p| descending, ties broken by p.
std::vector<int> top_modes(const swf::RadiationOperator& op, int P);

/// Scatter subset coefficients back into a dense length-p_max vector.
Eigen::VectorXcd expand_to_full(const Eigen::VectorXcd& j_subset, std::span<const int> modes,
                                int p_max);

struct P1Result {
  Eigen::VectorXcd j;
  double lambda = 0.0;          // KKT multiplier of the power constraint
  double power = 0.0;           // |j|^2
  double objective = 0.0;       // sum_k |b_k^T j - s_k|^2
  int bisection_steps = 0;
  bool power_active = false;
  std::string warning;          // set when K > P (exact recovery impossible)
};

/// Power-constrained least squares: j = (sum_k b_k* b_k^T + lambda I)^{-1}
/// sum_k s_k b_k*, with lambda = 0 when the minimum-norm solution fits the
/// budget and otherwise bisected so |j|^2 = P_T within tol_rel.
P1Result solve_p1(const BeamMatrix& B, const Eigen::VectorXcd& symbols, double P_T,
                  double tol_rel = 1e-6);

/// Normalized signal error sum_k |E_k - s_k|^2 / sum_k |s_k|^2 where E_k is
/// the w-combined total field at user k (direct plus scattered when a
/// matching system is supplied).
double signal_error(const Eigen::VectorXcd& j, const BeamMatrix& B,
                    const Eigen::VectorXcd& symbols,
                    const Eigen::MatrixXcd* scatter_rows = nullptr);

struct P2Options {
  int P = 30;
  double P_T = 1.0;
  double eps1 = 1e-3;
  int max_iter = 20;
  double tol_rel = 1e-6;         // bisection tolerance passed through to solve_p1
  scatter::MomOptions mom;
  std::vector<int> modes;        // empty = the top P modes by |sigma|
};

struct P2Result {
  Eigen::VectorXcd j;                // dense over the full mode set of the operator
  std::vector<int> modes;            // the subset actually optimized
  int iterations = 0;
  bool converged = false;
  std::vector<double> err_trace;     // signal error after each round
  double final_err = 0.0;            // full re-solve at the final currents
  double residual_rel = 0.0;         // MoM held-out residual at the final solve
  Eigen::VectorXcd user_fields;      // w-combined total field per user at the final j
};

/// Iterative solver for the scattering-aware problem: round i solves the
/// power-constrained least squares with retargeted symbols
/// s_k - E_s(r_k; j^{i-1}) and stops when the relative change of j drops
/// below eps1. Raises a convergence error when max_iter rounds are not
/// enough. With no alive scatterers this is solve_p1 in one round.
P2Result solve_p2(const env::Scene& scene, std::span<const UserTarget> users,
                  const swf::RadiationOperator& op, const P2Options& opts);

/// Mode-domain scattered response: column j is the w-combined scattered field
/// at each user when the transmit coefficients are the unit vector on
/// modes[j]. The total per-user response is the beam matrix plus this.
Eigen::MatrixXcd scatter_rows(const scatter::SurfaceSystem& system,
                              std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, std::span<const int> modes);

struct SvdSweepRow {
  int P = 0;
  double err = 0.0;
  double j_power = 0.0;
};

/// err(P) and |j_opt|^2(P) over a range of expansion orders at fixed budget.
/// by_sigma selects the top-P singular items per point; otherwise the modes
/// enter in flattened-index order.
std::vector<SvdSweepRow> sweep_svd_order(std::span<const UserTarget> users,
                                         const swf::RadiationOperator& op,
                                         std::span<const int> P_values, double P_T,
                                         bool by_sigma = true);

struct PowerAllocation {
  std::vector<double> power;  // |j_p|^2 per mode, aligned with the input order
  double water_level = 0.0;
  int dof = 0;                // active-mode count
};

/// Water-filling over channel gains sigma (sign ignored): |j_p|^2 =
/// max(wl - N/sigma_p^2, 0) with the budget met exactly.
PowerAllocation water_fill(std::span<const double> sigma, double P_T, double noise);

}  // namespace emchan::optim
