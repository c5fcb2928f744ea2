// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <utility>
#include <vector>

#include "emchan/geometry.hpp"

namespace emchan::quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre rule mapped to [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Product rule over the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform trapezoid in phi. Exact for spherical harmonics up to degree
/// n_theta - 2 (and azimuthal order < n_phi). Weights sum to 4*pi.
struct SphereRule {
  struct Node {
    double theta, phi, weight;
  };
  std::vector<Node> nodes;
};

SphereRule sphere_rule(int n_theta, int n_phi);

/// Rule sized for a truncation band N: n_theta = N + 2, n_phi = 2N + 2.
SphereRule sphere_rule_for_band(int n_band);

/// Product rule over a solid ball (radial Gauss-Legendre times sphere rule).
/// Weights include the r^2 Jacobian and sum to the ball volume.
struct BallRule {
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> points;
  std::vector<double> weights;
};

BallRule ball_rule(const Vec3& center, double radius, int n_r, int n_theta, int n_phi);

/// Same product construction over a spherical shell r_inner <= r <= r_outer.
BallRule shell_rule(const Vec3& center, double r_inner, double r_outer, int n_r, int n_theta,
                    int n_phi);

/// Quasi-uniform deterministic point set on the unit sphere (golden-angle
/// spiral). `rotated` applies a fixed rotation so two calls give disjoint,
/// equally uniform sets.
std::vector<Vec3> fibonacci_sphere(int n, bool rotated = false);

}  // namespace emchan::quadrature
