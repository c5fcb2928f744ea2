// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "emchan/error.hpp"

namespace emchan::optim {

BeamMatrix build_beam_vectors(std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, std::span<const int> modes) {
  for (int p : modes) {
    if (p < 1 || p > op.p_max) {
      throw_error(ErrorKind::config, "build_beam_vectors: mode index out of range");
    }
  }
  BeamMatrix B(users.size(), modes.size());
  std::vector<CVec3> buf(op.p_max);
  for (size_t k = 0; k < users.size(); ++k) {
    Spherical s = to_spherical(users[k].position);
    if (s.r <= op.geom.R_t) {
      throw_error(ErrorKind::config, "build_beam_vectors: user inside the source ball");
    }
    swf::eval_modes(s, op.k, op.n_trunc, swf::RadialKind::outgoing, buf);
    for (size_t c = 0; c < modes.size(); ++c) {
      int p = modes[c] - 1;
      // Plain weighted sum of the tri-polarized components, no conjugation.
      cplx combo = users[k].w(0) * buf[p](0) + users[k].w(1) * buf[p](1) +
                   users[k].w(2) * buf[p](2);
      B(k, c) = op.field_coef[p] * combo;
    }
  }
  return B;
}

BeamMatrix build_beam_vectors(std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, int P) {
  if (P < 1 || P > op.p_max) {
    throw_error(ErrorKind::config, "build_beam_vectors: P out of range for this operator");
  }
  std::vector<int> modes(P);
  std::iota(modes.begin(), modes.end(), 1);
  return build_beam_vectors(users, op, modes);
}

std::vector<int> top_modes(const swf::RadiationOperator& op, int P) {
  if (P < 1 || P > op.p_max) {
    throw_error(ErrorKind::config, "top_modes: P out of range for this operator");
  }
  std::vector<int> order(op.p_max);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double sa = std::abs(op.sigma[a - 1]), sb = std::abs(op.sigma[b - 1]);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  order.resize(P);
  return order;
}

Eigen::VectorXcd expand_to_full(const Eigen::VectorXcd& j_subset, std::span<const int> modes,
                                int p_max) {
  if (j_subset.size() != static_cast<Eigen::Index>(modes.size())) {
    throw_error(ErrorKind::config, "expand_to_full: size mismatch");
  }
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(p_max);
  for (size_t i = 0; i < modes.size(); ++i) full(modes[i] - 1) = j_subset(i);
  return full;
}

P1Result solve_p1(const BeamMatrix& B, const Eigen::VectorXcd& symbols, double P_T,
                  double tol_rel) {
  const int K = static_cast<int>(B.rows());
  const int P = static_cast<int>(B.cols());
  if (K < 1 || symbols.size() != K) {
    throw_error(ErrorKind::config, "solve_p1: need K >= 1 and matching symbol count");
  }
  if (!(P_T > 0.0) || !symbols.allFinite() || !B.allFinite()) {
    throw_error(ErrorKind::config, "solve_p1: P_T must be positive and inputs finite");
  }

  P1Result res;
  if (K > P) res.warning = "K > P: exact symbol recovery is underdetermined";

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXcd c = svd.matrixU().adjoint() * symbols;

  double s_max = sv.size() ? sv(0) : 0.0;
  double rank_tol = s_max * 1e-13;

  auto current_for = [&](double lambda) -> Eigen::VectorXcd {
    Eigen::VectorXcd scaled(sv.size());
    for (int i = 0; i < sv.size(); ++i) {
      double s = sv(i);
      if (lambda == 0.0) {
        scaled(i) = (s > rank_tol) ? c(i) / s : cplx(0.0);
      } else {
        scaled(i) = s / (s * s + lambda) * c(i);
      }
    }
    return svd.matrixV() * scaled;
  };
  auto power_for = [&](double lambda) {
    double acc = 0.0;
    for (int i = 0; i < sv.size(); ++i) {
      double s = sv(i);
      if (lambda == 0.0) {
        if (s > rank_tol) acc += std::norm(c(i)) / (s * s);
      } else {
        acc += s * s * std::norm(c(i)) / ((s * s + lambda) * (s * s + lambda));
      }
    }
    return acc;
  };

  double p0 = power_for(0.0);
  if (p0 <= P_T) {
    res.lambda = 0.0;
    res.j = current_for(0.0);
    res.power = p0;
    res.power_active = false;
  } else {
    // Bisect on the feasible side: power(lambda) is strictly decreasing, so
    // keeping the upper bracket guarantees |j|^2 <= P_T while the tolerance
    // controls how tight the equality is.
    double lo = 0.0, hi = std::max(s_max * s_max, 1e-30);
    while (power_for(hi) > P_T) {
      hi *= 2.0;
      if (!std::isfinite(hi)) throw_error(ErrorKind::internal, "solve_p1: bisection bracket failed");
    }
    int steps = 0;
    for (; steps < 200; ++steps) {
      if (power_for(hi) >= P_T * (1.0 - tol_rel)) break;
      double mid = 0.5 * (lo + hi);
      (power_for(mid) > P_T ? lo : hi) = mid;
    }
    res.lambda = hi;
    res.j = current_for(res.lambda);
    res.power = power_for(res.lambda);
    res.power_active = true;
    res.bisection_steps = steps;
  }
  res.objective = (B * res.j - symbols).squaredNorm();
  return res;
}

double signal_error(const Eigen::VectorXcd& j, const BeamMatrix& B,
                    const Eigen::VectorXcd& symbols, const Eigen::MatrixXcd* scatter_rows) {
  Eigen::VectorXcd e = B * j;
  if (scatter_rows != nullptr) e += (*scatter_rows) * j;
  double denom = symbols.squaredNorm();
  if (denom == 0.0) throw_error(ErrorKind::config, "signal_error: zero symbol vector");
  return (e - symbols).squaredNorm() / denom;
}

namespace {

// w-combined scalar scattered observation per user for a solved current set.
Eigen::VectorXcd combine_at_users(const Eigen::MatrixXcd& field_rows,
                                  std::span<const UserTarget> users,
                                  const Eigen::VectorXcd& coeff) {
  Eigen::VectorXcd e_cart = field_rows * coeff;  // 3K stacked Cartesian components
  Eigen::VectorXcd out(users.size());
  for (size_t k = 0; k < users.size(); ++k) {
    Spherical s = to_spherical(users[k].position);
    CVec3 sph = cartesian_to_spherical(e_cart.segment<3>(3 * k), s.theta, s.phi);
    out(k) = users[k].w(0) * sph(0) + users[k].w(1) * sph(1) + users[k].w(2) * sph(2);
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd scatter_rows(const scatter::SurfaceSystem& system,
                              std::span<const UserTarget> users,
                              const swf::RadiationOperator& op, std::span<const int> modes) {
  Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(users.size(), modes.size());
  if (system.empty()) return rows;
  std::vector<Vec3> pts(users.size());
  for (size_t k = 0; k < users.size(); ++k) pts[k] = users[k].position;
  Eigen::MatrixXcd field_rows = system.field_matrix(pts);
  for (size_t c = 0; c < modes.size(); ++c) {
    Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(op.p_max);
    unit(modes[c] - 1) = 1.0;
    swf::FieldFn incident = [&unit, &op](const Vec3& r) {
      return swf::radiate(std::span<const cplx>(unit.data(), unit.size()), r, op);
    };
    auto sol = system.solve(incident);
    rows.col(c) = combine_at_users(field_rows, users, sol.coeff);
  }
  return rows;
}

P2Result solve_p2(const env::Scene& scene, std::span<const UserTarget> users,
                  const swf::RadiationOperator& op, const P2Options& opts) {
  P2Result res;
  res.modes = opts.modes.empty() ? top_modes(op, opts.P) : opts.modes;
  BeamMatrix B = build_beam_vectors(users, op, res.modes);
  Eigen::VectorXcd s0(users.size());
  for (size_t k = 0; k < users.size(); ++k) s0(k) = users[k].symbol;

  auto p1 = solve_p1(B, s0, opts.P_T, opts.tol_rel);
  Eigen::VectorXcd j_sub = p1.j;
  res.iterations = 1;

  auto system = scatter::SurfaceSystem::from_scene(scene, op.k, op.omega, op.mu, opts.mom);
  if (system.empty()) {
    res.converged = true;
    res.user_fields = B * j_sub;
    res.final_err = (res.user_fields - s0).squaredNorm() / s0.squaredNorm();
    res.err_trace = {res.final_err};
    res.j = expand_to_full(j_sub, res.modes, op.p_max);
    return res;
  }

  std::vector<Vec3> pts(users.size());
  for (size_t k = 0; k < users.size(); ++k) pts[k] = users[k].position;
  Eigen::MatrixXcd field_rows = system.field_matrix(pts);

  scatter::SurfaceCurrentSolution mom;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Eigen::VectorXcd j_full = expand_to_full(j_sub, res.modes, op.p_max);
    auto incident = [&](const Vec3& r) {
      return swf::radiate(std::span<const cplx>(j_full.data(), j_full.size()), r, op);
    };
    mom = system.solve(incident);
    Eigen::VectorXcd es = combine_at_users(field_rows, users, mom.coeff);
    res.err_trace.push_back((B * j_sub + es - s0).squaredNorm() / s0.squaredNorm());

    Eigen::VectorXcd retarget = s0 - es;
    auto step = solve_p1(B, retarget, opts.P_T, opts.tol_rel);
    res.iterations = iter;
    double change = (step.j - j_sub).norm();
    j_sub = step.j;
    if (change < opts.eps1 * std::max(step.j.norm(), 1e-300)) {
      res.converged = true;
      break;
    }
  }
  res.j = expand_to_full(j_sub, res.modes, op.p_max);

  // Final consistency pass: scattered field re-solved at the returned
  // currents, residual and error reported for that solve.
  auto incident = [&](const Vec3& r) {
    return swf::radiate(std::span<const cplx>(res.j.data(), res.j.size()), r, op);
  };
  mom = system.solve(incident);
  Eigen::VectorXcd es = combine_at_users(field_rows, users, mom.coeff);
  res.user_fields = B * j_sub + es;
  res.final_err = (res.user_fields - s0).squaredNorm() / s0.squaredNorm();
  res.err_trace.push_back(res.final_err);
  res.residual_rel = mom.residual_rel;

  if (!res.converged) {
    std::ostringstream msg;
    msg << "solve_p2: no convergence in " << opts.max_iter << " iterations; err trace:";
    for (double e : res.err_trace) msg << " " << e;
    throw_error(ErrorKind::convergence, msg.str());
  }
  return res;
}

std::vector<SvdSweepRow> sweep_svd_order(std::span<const UserTarget> users,
                                         const swf::RadiationOperator& op,
                                         std::span<const int> P_values, double P_T,
                                         bool by_sigma) {
  int p_hi = 0;
  for (int p : P_values) p_hi = std::max(p_hi, p);
  BeamMatrix B = by_sigma ? build_beam_vectors(users, op, top_modes(op, p_hi))
                          : build_beam_vectors(users, op, p_hi);
  Eigen::VectorXcd s(users.size());
  for (size_t k = 0; k < users.size(); ++k) s(k) = users[k].symbol;

  std::vector<SvdSweepRow> rows;
  rows.reserve(P_values.size());
  for (int P : P_values) {
    auto r = solve_p1(B.leftCols(P), s, P_T);
    rows.push_back({P, r.objective / s.squaredNorm(), r.power});
  }
  return rows;
}

PowerAllocation water_fill(std::span<const double> sigma, double P_T, double noise) {
  if (sigma.empty()) throw_error(ErrorKind::config, "water_fill: empty gain vector");
  if (!(P_T > 0.0) || !(noise > 0.0)) {
    throw_error(ErrorKind::config, "water_fill: P_T and noise must be positive");
  }
  const int M = static_cast<int>(sigma.size());
  std::vector<double> floor_cost(M);
  for (int i = 0; i < M; ++i) {
    if (sigma[i] == 0.0) throw_error(ErrorKind::config, "water_fill: zero channel gain");
    floor_cost[i] = noise / (sigma[i] * sigma[i]);
  }
  std::vector<int> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return floor_cost[a] < floor_cost[b]; });

  PowerAllocation alloc;
  alloc.power.assign(M, 0.0);
  double prefix = 0.0;
  double wl = 0.0;
  int active = 0;
  for (int t = 1; t <= M; ++t) {
    prefix += floor_cost[order[t - 1]];
    double candidate = (P_T + prefix) / t;
    if (candidate > floor_cost[order[t - 1]]) {
      wl = candidate;
      active = t;
    }
  }
  alloc.water_level = wl;
  alloc.dof = active;
  for (int i = 0; i < active; ++i) {
    alloc.power[order[i]] = wl - floor_cost[order[i]];
  }
  return alloc;
}

}  // namespace emchan::optim
