// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/quadrature.hpp"

#include <cmath>

#include "emchan/constants.hpp"
#include "emchan/error.hpp"

namespace emchan::quadrature {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw_error(ErrorKind::config, "gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration from the Chebyshev-based initial guess; symmetric pairs.
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  gauss_legendre(n, nodes, weights);
  double mid = 0.5 * (a + b), len = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    nodes[i] = mid + len * nodes[i];
    weights[i] *= len;
  }
}

SphereRule sphere_rule(int n_theta, int n_phi) {
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereRule rule;
  rule.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  double wphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    double theta = std::acos(x[i]);
    for (int j = 0; j < n_phi; ++j) {
      rule.nodes.push_back({theta, (j + 0.5) * wphi, w[i] * wphi});
    }
  }
  return rule;
}

SphereRule sphere_rule_for_band(int n_band) {
  return sphere_rule(n_band + 2, 2 * n_band + 2);
}

BallRule ball_rule(const Vec3& center, double radius, int n_r, int n_theta, int n_phi) {
  if (radius <= 0.0) throw_error(ErrorKind::config, "ball_rule: radius must be positive");
  std::vector<double> r, wr;
  gauss_legendre(n_r, 0.0, radius, r, wr);
  SphereRule ang = sphere_rule(n_theta, n_phi);
  BallRule rule;
  rule.center = center;
  rule.points.reserve(static_cast<size_t>(n_r) * ang.nodes.size());
  rule.weights.reserve(rule.points.capacity());
  for (int i = 0; i < n_r; ++i) {
    for (const auto& node : ang.nodes) {
      Spherical s{r[i], node.theta, node.phi};
      rule.points.push_back(center + to_cartesian(s));
      rule.weights.push_back(wr[i] * r[i] * r[i] * node.weight);
    }
  }
  return rule;
}

BallRule shell_rule(const Vec3& center, double r_inner, double r_outer, int n_r, int n_theta,
                    int n_phi) {
  if (!(0.0 <= r_inner && r_inner < r_outer)) {
    throw_error(ErrorKind::config, "shell_rule: need 0 <= r_inner < r_outer");
  }
  std::vector<double> r, wr;
  gauss_legendre(n_r, r_inner, r_outer, r, wr);
  SphereRule ang = sphere_rule(n_theta, n_phi);
  BallRule rule;
  rule.center = center;
  for (int i = 0; i < n_r; ++i) {
    for (const auto& node : ang.nodes) {
      Spherical s{r[i], node.theta, node.phi};
      rule.points.push_back(center + to_cartesian(s));
      rule.weights.push_back(wr[i] * r[i] * r[i] * node.weight);
    }
  }
  return rule;
}

std::vector<Vec3> fibonacci_sphere(int n, bool rotated) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * i;
    pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  if (rotated) {
    // Fixed rotation about the (1,1,1) diagonal keeps the set quasi-uniform
    // while avoiding the original points.
    Eigen::AngleAxisd rot(0.73, Vec3(1, 1, 1).normalized());
    for (auto& p : pts) p = rot * p;
  }
  return pts;
}

}  // namespace emchan::quadrature
