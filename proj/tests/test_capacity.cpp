#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "emchan/capacity.hpp"
#include "emchan/constants.hpp"
#include "emchan/rng.hpp"

using namespace emchan;
using namespace emchan::capacity;

namespace {

constexpr double kWave = 2.0 * kPi;

const swf::RadiationOperator& op_small() {
  static auto op = swf::normalize_modes({0.5, 1.0, 6.0}, kWave, 10, {.verify = false});
  return op;
}

MuScenario small_scenario() {
  MuScenario sc;
  sc.geom = op_small().geom;
  sc.n_users = 3;
  sc.P = 12;
  sc.env.scatterer_radius = 0.25;
  sc.env.clearance = 0.1;
  sc.env.sigma_ds = 0.7;
  sc.env.sigma_as = 1.2;
  sc.env.sigma_es = 0.7;
  sc.env.mean_count = 2.0;
  sc.mom.basis_count = 16;
  sc.mom.match_points = 32;
  return sc;
}

Eigen::MatrixXcd random_rows(int K, int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd H(K, P);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < P; ++j) H(i, j) = cplx(g(rng), g(rng));
  return H;
}

}  // namespace

TEST_SUITE("capacity") {

TEST_CASE("single-user water-filling capacity") {
  const auto& op = op_small();
  SUBCASE("no power, no rate") {
    auto c = single_user_capacity(op, 0.0, 1.0);
    CHECK(c.capacity == 0.0);
    CHECK(c.dof == 0);
  }
  SUBCASE("strictly increasing in the budget") {
    double prev = 0.0;
    int prev_dof = 0;
    for (int i = 1; i <= 10; ++i) {
      double p_t = std::pow(10.0, -3.0 + 0.6 * i);
      auto c = single_user_capacity(op, p_t, 1.0);
      CHECK(c.capacity > prev);
      CHECK(c.dof >= prev_dof);
      prev = c.capacity;
      prev_dof = c.dof;
    }
  }
  SUBCASE("larger source aperture raises the capacity") {
    auto op_large = swf::normalize_modes({1.5, 1.0, 6.0}, kWave, 16, {.verify = false});
    double p_t = 1.0;
    CHECK(single_user_capacity(op_large, p_t, 1.0).capacity >
          single_user_capacity(op, p_t, 1.0).capacity);
  }
}

TEST_CASE("multi-user capacity monte carlo") {
  MuScenario sc = small_scenario();
  const auto& op = op_small();

  SUBCASE("no users, no capacity") {
    MuScenario empty = sc;
    empty.n_users = 0;
    auto est = multi_user_capacity(empty, op, 1.0, 1.0, 4, 1, false);
    CHECK(est.mean == 0.0);
  }
  SUBCASE("capacity grows with the budget") {
    auto lo = multi_user_capacity(sc, op, 1e-4, 1.0, 12, 5, false);
    auto mid = multi_user_capacity(sc, op, 1e-2, 1.0, 12, 5, false);
    auto hi = multi_user_capacity(sc, op, 1.0, 1.0, 12, 5, false);
    CHECK(lo.mean < mid.mean);
    CHECK(mid.mean < hi.mean);
  }
  SUBCASE("matched seeds make the variants comparable") {
    auto a = multi_user_capacity(sc, op, 0.01, 1.0, 6, 42, false);
    auto b = multi_user_capacity(sc, op, 0.01, 1.0, 6, 42, false);
    CHECK(a.mean == b.mean);  // determinism
    auto scat = multi_user_capacity(sc, op, 0.01, 1.0, 6, 42, true);
    CHECK(scat.mean != a.mean);
  }
  SUBCASE("thread layout cannot change the estimate") {
    setenv("EMCHAN_THREADS", "1", 1);
    auto serial = multi_user_capacity(sc, op, 0.01, 1.0, 8, 7, true);
    setenv("EMCHAN_THREADS", "4", 1);
    auto parallel = multi_user_capacity(sc, op, 0.01, 1.0, 8, 7, true);
    unsetenv("EMCHAN_THREADS");
    CHECK(serial.mean == parallel.mean);
    CHECK(serial.std_error == parallel.std_error);
  }
}

TEST_CASE("standard errors shrink like the square root of the ensemble") {
  MuScenario sc = small_scenario();
  const auto& op = op_small();
  auto e50 = multi_user_capacity(sc, op, 0.01, 1.0, 50, 99, false);
  auto e200 = multi_user_capacity(sc, op, 0.01, 1.0, 200, 99, false);
  auto e800 = multi_user_capacity(sc, op, 0.01, 1.0, 800, 99, false);
  CHECK(std::abs(e50.std_error / e200.std_error - 2.0) < 0.5);
  CHECK(std::abs(e200.std_error / e800.std_error - 2.0) < 0.5);
  CHECK(std::abs(e50.std_error / e800.std_error - 4.0) < 1.0);
}

TEST_CASE("precoder constructions") {
  SUBCASE("single user reduces to matched filtering") {
    auto H = random_rows(1, 6, 3);
    double P_T = 2.0, N = 1.0;
    auto Wm = mmse_precoder(H, P_T, N);
    auto Ws = slnr_precoder(H, P_T, N);
    // Both directions are the conjugate-matched beam at full power.
    double snr = P_T * H.squaredNorm();
    CHECK(precoded_sum_rate(H, Wm, N) == doctest::Approx(std::log2(1.0 + snr)).epsilon(1e-9));
    CHECK(precoded_sum_rate(H, Ws, N) == doctest::Approx(std::log2(1.0 + snr)).epsilon(1e-9));
  }
  SUBCASE("orthogonal rows carry no interference") {
    int K = 3, P = 8;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(K, P);
    H(0, 0) = 1.3;
    H(1, 1) = cplx(0.0, 0.9);
    H(2, 2) = 0.7;
    double P_T = 5.0, N = 1.0;
    for (auto W : {mmse_precoder(H, P_T, N), slnr_precoder(H, P_T, N)}) {
      Eigen::MatrixXcd link = H * W;
      double off = 0.0;
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
          if (a != b) off += std::norm(link(a, b));
      CHECK(off < 1e-18);
      // Rate equals the interference-free sum over the same link gains.
      double direct = 0.0;
      for (int k = 0; k < K; ++k) direct += std::log2(1.0 + std::norm(link(k, k)) / N);
      CHECK(precoded_sum_rate(H, W, N) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
  SUBCASE("zeroing the other streams recovers the per-user snr term") {
    auto H = random_rows(4, 10, 17);
    auto W = slnr_precoder(H, 3.0, 1.0);
    for (int k = 0; k < 4; ++k) {
      Eigen::MatrixXcd Wk = Eigen::MatrixXcd::Zero(10, 4);
      Wk.col(k) = W.col(k);
      Eigen::MatrixXcd Hk = H.row(k);
      Eigen::MatrixXcd Wsingle = Wk.col(k);
      double snr_term = std::log2(1.0 + std::norm((H * Wk)(k, k)) / 1.0);
      CHECK(precoded_sum_rate(Hk, Wsingle, 1.0) == doctest::Approx(snr_term).epsilon(1e-12));
    }
  }
  SUBCASE("precoded capacity runs end to end") {
    MuScenario sc = small_scenario();
    const auto& op = op_small();
    auto mmse = multi_user_capacity_precoded(sc, op, Precoder::mmse, 0.1, 1.0, 6, 13, true);
    auto slnr = multi_user_capacity_precoded(sc, op, Precoder::slnr, 0.1, 1.0, 6, 13, true);
    CHECK(mmse.mean > 0.0);
    CHECK(slnr.mean > 0.0);
  }
}

}  // TEST_SUITE
