#include <doctest.h>

#include <cmath>
#include <random>

#include "emchan/constants.hpp"
#include "emchan/error.hpp"
#include "emchan/optim.hpp"
#include "emchan/rng.hpp"

using namespace emchan;
using namespace emchan::optim;

namespace {

constexpr double kWave = 2.0 * kPi;

// One shared operator for the whole suite; building it dominates test time.
const swf::RadiationOperator& test_operator() {
  static swf::RadiationOperator op =
      swf::normalize_modes({0.5, 0.5, 6.0}, kWave, 9, {.verify = false});
  return op;
}

Eigen::MatrixXcd random_beam(int K, int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd B(K, P);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < P; ++j) B(i, j) = cplx(g(rng), g(rng));
  return B;
}

Eigen::VectorXcd random_symbols(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  Eigen::VectorXcd s(K);
  for (int i = 0; i < K; ++i) s(i) = std::polar(1.0, u(rng));
  return s;
}

// Independent convex-solver oracle: projected gradient on the same objective.
double projected_gradient_objective(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& s,
                                    double P_T, int iters) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  double L = 2.0 * svd.singularValues()(0) * svd.singularValues()(0);
  double step = 1.0 / L;
  Eigen::VectorXcd j = Eigen::VectorXcd::Zero(B.cols());
  double radius = std::sqrt(P_T);
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXcd grad = 2.0 * (B.adjoint() * (B * j - s));
    j -= step * grad;
    double n = j.norm();
    if (n > radius) j *= radius / n;
  }
  return (B * j - s).squaredNorm();
}

std::vector<UserTarget> users_in_rx_ball(int K, std::uint64_t seed,
                                         const swf::RadiationOperator& op) {
  auto rng = make_stream(seed, stream_tag::users);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0), ph(0.0, 2.0 * kPi);
  std::vector<UserTarget> users(K);
  for (auto& user : users) {
    Vec3 dir(g(rng), g(rng), g(rng));
    dir.normalize();
    user.position = op.geom.rx_center() + op.geom.R_r * std::cbrt(u(rng)) * dir;
    user.symbol = std::polar(1.0, ph(rng));
  }
  return users;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("water filling closed cases") {
  SUBCASE("single mode takes all power") {
    double sig[] = {2.0};
    auto a = water_fill(sig, 3.0, 1.0);
    CHECK(a.dof == 1);
    CHECK(a.power[0] == doctest::Approx(3.0));
    CHECK(std::log2(1.0 + 4.0 * 3.0) == doctest::Approx(std::log2(13.0)));
  }
  SUBCASE("two equal modes split evenly") {
    double sig[] = {1.5, 1.5};
    auto a = water_fill(sig, 2.0, 1.0);
    CHECK(a.dof == 2);
    CHECK(a.power[0] == doctest::Approx(1.0));
    CHECK(a.power[1] == doctest::Approx(1.0));
  }
  SUBCASE("weak mode stays off at low power") {
    double sig[] = {2.0, 0.01};
    auto a = water_fill(sig, 0.5, 1.0);
    CHECK(a.dof == 1);
    CHECK(a.power[1] == 0.0);
  }
}

TEST_CASE("water filling matches grid search on three modes") {
  double sig[] = {1.8, 0.9, 0.35};
  double P_T = 4.0, N = 1.0;
  auto a = water_fill(sig, P_T, N);
  double c_wf = 0.0;
  for (int i = 0; i < 3; ++i) c_wf += std::log2(1.0 + sig[i] * sig[i] * a.power[i] / N);

  // Exhaustive simplex grid, ~10^4 points.
  double best = 0.0;
  const int G = 100;
  for (int i = 0; i <= G; ++i) {
    for (int j = 0; j + i <= G; ++j) {
      double p1 = P_T * i / G, p2 = P_T * j / G, p3 = P_T - p1 - p2;
      double c = std::log2(1.0 + sig[0] * sig[0] * p1 / N) +
                 std::log2(1.0 + sig[1] * sig[1] * p2 / N) +
                 std::log2(1.0 + sig[2] * sig[2] * p3 / N);
      best = std::max(best, c);
    }
  }
  CHECK(c_wf >= best - 1e-12);
  CHECK(c_wf == doctest::Approx(best).epsilon(1e-3));
}

TEST_CASE("water filling invariants") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> sig(8);
    for (auto& s : sig) s = u(rng);
    double P_T = u(rng) * 4.0, N = 0.7;
    auto a = water_fill(sig, P_T, N);
    double total = 0.0;
    for (int i = 0; i < 8; ++i) {
      total += a.power[i];
      double floor_cost = N / (sig[i] * sig[i]);
      if (a.power[i] > 0.0) {
        CHECK(a.power[i] + floor_cost == doctest::Approx(a.water_level).epsilon(1e-12));
      } else {
        CHECK(floor_cost >= a.water_level - 1e-12);
      }
    }
    CHECK(total == doctest::Approx(P_T).epsilon(1e-9));
  }
  SUBCASE("active-mode count grows with the budget") {
    std::vector<double> sig = {2.0, 1.0, 0.5, 0.25, 0.1};
    int prev = 0;
    for (double pt : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      auto a = water_fill(sig, pt, 1.0);
      CHECK(a.dof >= prev);
      prev = a.dof;
    }
    CHECK(prev == 5);
  }
}

TEST_CASE("solve_p1 meets its KKT certificates") {
  std::mt19937_64 seeds(31);
  for (int trial = 0; trial < 20; ++trial) {
    int K = 2 + static_cast<int>(seeds() % 5);
    int P = K + 1 + static_cast<int>(seeds() % 10);
    auto B = random_beam(K, P, seeds());
    auto s = random_symbols(K, seeds());
    double P_T = 0.05 + 0.1 * (trial % 7);  // small enough to activate the constraint often
    auto r = solve_p1(B, s, P_T);

    CHECK(r.lambda >= 0.0);
    CHECK(r.power <= P_T * (1.0 + 1e-12));
    // Complementary slackness.
    CHECK(std::abs(r.lambda * (r.power - P_T)) < 1e-6 * P_T * std::max(r.lambda, 1.0));
    if (r.power_active) {
      CHECK(std::abs(r.power - P_T) < 1e-6 * P_T);
    }
    // Stationarity of the Lagrangian.
    Eigen::VectorXcd rhs = B.adjoint() * s;
    Eigen::VectorXcd station = B.adjoint() * (B * r.j) + r.lambda * r.j - rhs;
    CHECK(station.norm() < 1e-8 * rhs.norm());
  }
}

TEST_CASE("solve_p1 against a projected-gradient oracle") {
  std::mt19937_64 seeds(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto B = random_beam(4, 12, seeds());
    auto s = random_symbols(4, seeds());
    double P_T = (trial % 2) ? 0.02 : 50.0;  // constrained and unconstrained regimes
    auto r = solve_p1(B, s, P_T);
    double f_pg = projected_gradient_objective(B, s, P_T, 60000);
    CHECK(r.objective <= f_pg + 1e-6 * std::max(1.0, f_pg));  // ours is the minimizer
    CHECK(std::abs(r.objective - f_pg) < 1e-5 * std::max(1.0, f_pg));
  }
}

TEST_CASE("solve_p1 exact recovery and phase invariance") {
  SUBCASE("one user with a huge budget is solved exactly") {
    auto B = random_beam(1, 6, 5);
    auto s = random_symbols(1, 6);
    auto r = solve_p1(B, s, 1e9);
    CHECK(signal_error(r.j, B, s) < 1e-10);
  }
  SUBCASE("global symbol phase leaves the power spectrum unchanged") {
    auto B = random_beam(3, 8, 15);
    auto s = random_symbols(3, 16);
    auto r1 = solve_p1(B, s, 0.4);
    auto r2 = solve_p1(B, std::polar(1.0, 1.234) * s, 0.4);
    CHECK(r1.objective == doctest::Approx(r2.objective).epsilon(1e-10));
    for (int p = 0; p < 8; ++p) {
      CHECK(std::abs(r1.j(p)) == doctest::Approx(std::abs(r2.j(p))).epsilon(1e-8));
    }
  }
  SUBCASE("zero current scores err = 1, perfect recovery scores 0") {
    auto B = random_beam(3, 8, 25);
    auto s = random_symbols(3, 26);
    CHECK(signal_error(Eigen::VectorXcd::Zero(8), B, s) == doctest::Approx(1.0));
  }
  SUBCASE("K > P only warns") {
    auto B = random_beam(5, 3, 33);
    auto s = random_symbols(5, 34);
    auto r = solve_p1(B, s, 1.0);
    CHECK(!r.warning.empty());
  }
}

TEST_CASE("beam vectors match independently evaluated mode components") {
  const auto& op = test_operator();
  auto users = users_in_rx_ball(5, 1234, op);
  int P = 20;
  auto B = build_beam_vectors(users, op, P);
  for (size_t k = 0; k < users.size(); ++k) {
    Spherical s = to_spherical(users[k].position);
    for (int p : {1, 4, 11, 20}) {
      auto u = swf::eval_U(swf::unflatten(p), s, op.k);
      cplx expect = op.sigma[p - 1] / op.u_norm[p - 1] *
                    (users[k].w(0) * u.v(0) + users[k].w(1) * u.v(1) + users[k].w(2) * u.v(2));
      CHECK(std::abs(B(k, p - 1) - expect) <= 1e-10 * std::abs(expect));
    }
  }
  SUBCASE("radial gains select radial components only") {
    std::vector<UserTarget> radial = users;
    for (auto& u : radial) u.w = CVec3(1.0, 0.0, 0.0);
    auto Br = build_beam_vectors(radial, op, P);
    // TE modes have no radial component, so their columns vanish.
    for (int p = 1; p <= P; p += 2) {
      CHECK(Br.col(p - 1).norm() == 0.0);  // odd p is l = 1
    }
  }
  SUBCASE("linearity in the polarization gains") {
    std::vector<UserTarget> wa = users, wb = users;
    for (auto& u : wa) u.w = CVec3(0.3, 0.0, 1.0);
    for (auto& u : wb) u.w = CVec3(0.0, 2.0, -0.5);
    std::vector<UserTarget> wab = users;
    for (size_t i = 0; i < users.size(); ++i) wab[i].w = wa[i].w + wb[i].w;
    auto Ba = build_beam_vectors(wa, op, P);
    auto Bb = build_beam_vectors(wb, op, P);
    auto Bab = build_beam_vectors(wab, op, P);
    CHECK((Bab - (Ba + Bb)).norm() <= 1e-12 * Bab.norm());
  }
}

TEST_CASE("svd order sweep structure") {
  const auto& op = test_operator();
  auto users = users_in_rx_ball(5, 999, op);
  std::vector<int> P_values;
  for (int p = 1; p <= 30; ++p) P_values.push_back(p);
  auto rows = sweep_svd_order(users, op, P_values, 1e12);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].err <= rows[i - 1].err * (1.0 + 1e-9) + 1e-20);  // 1e-20: rounding floor
  }
  // Rapid error drop once P reaches the user count.
  double before = rows[5 - 2].err;  // P = K - 1
  double after = rows[5 + 1].err;   // P = K + 2
  CHECK(after < 0.1 * before);
}

TEST_CASE("p2 reduces to p1 without scatterers and improves with them") {
  const auto& op = test_operator();
  auto users = users_in_rx_ball(3, 321, op);
  env::Scene scene;
  scene.geom = op.geom;

  P2Options opts;
  opts.P = 16;
  opts.P_T = 1e4;
  opts.mom.basis_count = 30;
  opts.mom.match_points = 48;

  SUBCASE("empty scene short-circuits") {
    auto r2 = solve_p2(scene, users, op, opts);
    CHECK(r2.converged);
    CHECK(r2.iterations == 1);
    Eigen::VectorXcd s(3);
    for (int i = 0; i < 3; ++i) s(i) = users[i].symbol;
    auto modes = top_modes(op, opts.P);
    auto B = build_beam_vectors(users, op, modes);
    auto r1 = solve_p1(B, s, opts.P_T);
    auto full = expand_to_full(r1.j, modes, op.p_max);
    CHECK((r2.j - full).norm() <= 1e-12 * full.norm());
  }

  SUBCASE("weak scatterer converges fast and beats the scatter-blind current") {
    // ka = 0.2 sphere away from the users.
    env::Scatterer sc;
    sc.radius = 0.2 / kWave;
    sc.center = op.geom.rx_center() + Vec3(op.geom.R_r + 8.0 * sc.radius, 0.0, 0.0);
    sc.id = 1;
    scene.scatterers.push_back(sc);

    auto r2 = solve_p2(scene, users, op, opts);
    CHECK(r2.converged);
    CHECK(r2.iterations <= 3);

    // Evaluate both currents under the same full scattering model.
    auto system = scatter::SurfaceSystem::from_scene(scene, op.k, op.omega, op.mu, opts.mom);
    auto modes = top_modes(op, opts.P);
    auto rows = scatter_rows(system, users, op, modes);
    auto B = build_beam_vectors(users, op, modes);
    Eigen::VectorXcd s(3);
    for (int i = 0; i < 3; ++i) s(i) = users[i].symbol;
    auto blind = solve_p1(B, s, opts.P_T);
    double err_blind = signal_error(blind.j, B, s, &rows);
    Eigen::VectorXcd aware_sub(modes.size());
    for (size_t c = 0; c < modes.size(); ++c) aware_sub(c) = r2.j(modes[c] - 1);
    double err_aware = signal_error(aware_sub, B, s, &rows);
    CHECK(err_aware <= err_blind * (1.0 + 1e-9));
    CHECK(r2.final_err == doctest::Approx(err_aware).epsilon(1e-6));
  }
}

}  // TEST_SUITE
