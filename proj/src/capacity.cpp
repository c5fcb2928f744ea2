// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/capacity.hpp"

#include <cmath>

#include "emchan/error.hpp"
#include "emchan/parallel.hpp"
#include "emchan/rng.hpp"

namespace emchan::capacity {

SuCapacity single_user_capacity(const swf::RadiationOperator& op, double P_T, double noise) {
  if (P_T < 0.0 || noise <= 0.0) {
    throw_error(ErrorKind::config, "single_user_capacity: need P_T >= 0 and noise > 0");
  }
  if (P_T == 0.0) return {0.0, 0};
  std::vector<double> gains(op.p_max);
  for (int p = 0; p < op.p_max; ++p) gains[p] = std::abs(op.sigma[p]);
  auto alloc = optim::water_fill(gains, P_T, noise);
  SuCapacity out;
  out.dof = alloc.dof;
  for (int p = 0; p < op.p_max; ++p) {
    if (alloc.power[p] > 0.0) {
      out.capacity += std::log2(1.0 + gains[p] * gains[p] * alloc.power[p] / noise);
    }
  }
  return out;
}

std::vector<Vec3> draw_users(const swf::SphGeometry& geom, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> users(count);
  for (auto& pos : users) {
    Vec3 dir(g(rng), g(rng), g(rng));
    double n = dir.norm();
    if (n == 0.0) dir = Vec3::UnitX(); else dir /= n;
    pos = geom.rx_center() + geom.R_r * std::cbrt(u(rng)) * dir;
  }
  return users;
}

namespace {

std::vector<optim::UserTarget> realize_users(const MuScenario& sc, std::uint64_t seed, int i) {
  std::vector<optim::UserTarget> users(sc.n_users);
  auto urng = make_stream(seed, stream_tag::users, static_cast<std::uint64_t>(i));
  std::vector<Vec3> pos = sc.fixed_users.empty()
                              ? draw_users(sc.geom, sc.n_users, urng)
                              : sc.fixed_users;
  auto srng = make_stream(seed, stream_tag::symbols, static_cast<std::uint64_t>(i));
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  for (int k = 0; k < sc.n_users; ++k) {
    users[k].position = pos[k];
    users[k].symbol = std::polar(1.0, ph(srng));
    users[k].w = sc.w;
  }
  return users;
}

CapacityEstimate reduce(const std::vector<double>& rates) {
  CapacityEstimate est;
  est.ensemble = static_cast<int>(rates.size());
  for (double r : rates) est.mean += r;
  est.mean /= est.ensemble;
  if (est.ensemble > 1) {
    double acc = 0.0;
    for (double r : rates) acc += (r - est.mean) * (r - est.mean);
    est.std_error = std::sqrt(acc / (est.ensemble - 1.0) / est.ensemble);
  }
  return est;
}

}  // namespace

CapacityEstimate multi_user_capacity(const MuScenario& sc, const swf::RadiationOperator& op,
                                     double P_T, double noise, int ensemble,
                                     std::uint64_t seed, bool with_scattering) {
  if (ensemble < 1) throw_error(ErrorKind::config, "multi_user_capacity: ensemble_size >= 1");
  if (sc.n_users == 0) return {0.0, 0.0, ensemble};

  std::vector<double> rates(ensemble, 0.0);
  parallel_for(ensemble, [&](int i) {
    auto users = realize_users(sc, seed, i);
    Eigen::VectorXcd fields;
    if (with_scattering) {
      env::Scene scene;
      if (sc.fixed_scene) {
        scene = *sc.fixed_scene;
      } else {
        auto scene_rng = make_stream(seed, stream_tag::scene, static_cast<std::uint64_t>(i));
        scene = env::draw_scene(sc.env, sc.geom, scene_rng);
      }
      optim::P2Options opts;
      opts.P = sc.P;
      opts.P_T = P_T;
      opts.eps1 = sc.eps1;
      opts.max_iter = sc.max_iter;
      opts.mom = sc.mom;
      try {
        fields = optim::solve_p2(scene, users, op, opts).user_fields;
      } catch (const Error& e) {
        throw Error(e.kind(), "realization " + std::to_string(i) + ": " + e.what());
      }
    } else {
      auto B = optim::build_beam_vectors(users, op, optim::top_modes(op, sc.P));
      Eigen::VectorXcd s(sc.n_users);
      for (int k = 0; k < sc.n_users; ++k) s(k) = users[k].symbol;
      auto p1 = optim::solve_p1(B, s, P_T);
      fields = B * p1.j;
    }
    double rate = 0.0;
    for (int k = 0; k < sc.n_users; ++k) {
      rate += std::log2(1.0 + std::norm(fields(k)) / noise);
    }
    rates[i] = rate;
  });
  return reduce(rates);
}

Eigen::MatrixXcd mmse_precoder(const Eigen::MatrixXcd& H, double P_T, double noise) {
  const int K = static_cast<int>(H.rows());
  double alpha = K * noise / P_T;
  Eigen::MatrixXcd gram = H * H.adjoint();
  gram.diagonal().array() += alpha;
  Eigen::MatrixXcd raw = H.adjoint() * gram.inverse();
  double scale = std::sqrt(P_T / std::max(raw.squaredNorm(), 1e-300));
  return scale * raw;
}

Eigen::MatrixXcd slnr_precoder(const Eigen::MatrixXcd& H, double P_T, double noise) {
  const int K = static_cast<int>(H.rows());
  const int P = static_cast<int>(H.cols());
  double alpha = K * noise / P_T;
  Eigen::MatrixXcd W(P, K);
  // Total leakage-plus-noise matrix; per user the own rank-one term is
  // removed. The rank-one signal makes the leading generalized eigenvector
  // explicit: w_k is parallel to M_k^{-1} conj(h_k).
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(P, P);
  for (int u = 0; u < K; ++u) {
    total += H.row(u).transpose().conjugate() * H.row(u);
  }
  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXcd m = total - H.row(k).transpose().conjugate() * H.row(k);
    m.diagonal().array() += alpha;
    Eigen::VectorXcd d = m.llt().solve(H.row(k).transpose().conjugate());
    double n = d.norm();
    if (!(n > 0.0) || !d.allFinite()) {
      // Degenerate leakage matrix; fall back to the matched direction.
      d = H.row(k).transpose().conjugate();
      n = d.norm();
    }
    W.col(k) = std::sqrt(P_T / K) * d / n;
  }
  return W;
}

double precoded_sum_rate(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& W, double noise,
                         double efficiency) {
  const int K = static_cast<int>(H.rows());
  Eigen::MatrixXcd link = H * W;  // entry (k, u): field at user k from stream u
  double rate = 0.0;
  for (int k = 0; k < K; ++k) {
    double sig = efficiency * std::norm(link(k, k));
    double interference = 0.0;
    for (int u = 0; u < K; ++u) {
      if (u != k) interference += efficiency * std::norm(link(k, u));
    }
    rate += std::log2(1.0 + sig / (interference + noise));
  }
  return rate;
}

CapacityEstimate multi_user_capacity_precoded(const MuScenario& sc,
                                              const swf::RadiationOperator& op,
                                              Precoder precoder, double P_T, double noise,
                                              int ensemble, std::uint64_t seed,
                                              bool with_scattering, double efficiency) {
  if (ensemble < 1) throw_error(ErrorKind::config, "multi_user_capacity_precoded: ensemble >= 1");
  if (sc.n_users == 0) return {0.0, 0.0, ensemble};

  std::vector<double> rates(ensemble, 0.0);
  parallel_for(ensemble, [&](int i) {
    auto users = realize_users(sc, seed, i);
    auto modes = optim::top_modes(op, sc.P);
    Eigen::MatrixXcd H = optim::build_beam_vectors(users, op, modes);
    if (with_scattering) {
      env::Scene scene;
      if (sc.fixed_scene) {
        scene = *sc.fixed_scene;
      } else {
        auto scene_rng = make_stream(seed, stream_tag::scene, static_cast<std::uint64_t>(i));
        scene = env::draw_scene(sc.env, sc.geom, scene_rng);
      }
      if (scene.alive_count() > 0) {
        auto system =
            scatter::SurfaceSystem::from_scene(scene, op.k, op.omega, op.mu, sc.mom);
        H += optim::scatter_rows(system, users, op, modes);
      }
    }
    Eigen::MatrixXcd W = (precoder == Precoder::mmse) ? mmse_precoder(H, P_T, noise)
                                                      : slnr_precoder(H, P_T, noise);
    rates[i] = precoded_sum_rate(H, W, noise, efficiency);
  });
  return reduce(rates);
}

}  // namespace emchan::capacity
