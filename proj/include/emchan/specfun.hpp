// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <complex>
#include <vector>

namespace emchan::specfun {

/// Degree/order pair of a spherical harmonic, n >= 0 and |m| <= n.
struct Order {
  int n = 0;
  int m = 0;
  bool valid() const { return n >= 0 && m >= -n && m <= n; }
};

/// Integer-order Bessel function of the first kind J_n(x), x >= 0.
double bessel_j(int n, double x);

/// Spherical Bessel functions. j_n is evaluated by downward (Miller)
/// recurrence normalized at j_0, y_n by upward recurrence; upward recurrence
/// for j_n is unstable once n exceeds x.
double spherical_j(int n, double x);
double spherical_y(int n, double x);  // x > 0
std::complex<double> spherical_h1(int n, double x);

/// Batched variants filling out[0..n_max]. Much cheaper than repeated scalar
/// calls inside the wave-function evaluators.
void spherical_j_array(int n_max, double x, std::vector<double>& out);
void spherical_y_array(int n_max, double x, std::vector<double>& out);

/// Derivatives from the analytic recurrence z_n' = z_{n-1} - (n+1)/x z_n.
double spherical_j_deriv(int n, double x);
double spherical_y_deriv(int n, double x);

/// Associated Legendre function of the first kind, Ferrers/Rodrigues form
/// without the Condon-Shortley phase: P_n^m(x) = (1-x^2)^{m/2} d^m P_n / dx^m,
/// with 0 <= m <= n and |x| <= 1.
double assoc_legendre(int n, int m, double x);

/// Spherical harmonic with the |m|-inside-the-factorial normalization
///   Y_nm = sqrt((n-|m|)!(2n+1) / ((n+|m|)! 4 pi)) P_n^{|m|}(cos theta) e^{i m phi}.
/// The factorial ratio is evaluated in log space. With this convention
/// Y_{n,-m} = conj(Y_{n,m}) exactly.
std::complex<double> spherical_harmonic(int n, int m, double theta, double phi);

/// Normalized associated Legendre table at a fixed polar angle.
///   p[idx(m,n)]  = A_nm P_n^m(cos theta)          (A_nm as in Y_nm above)
///   dp           = d/dtheta of the same
///   p_over_sin   = A_nm P_n^m(cos theta) / sin(theta)
/// All three stay O(1) for any n. Pole limits are built in: only the m = 1
/// column of dp/p_over_sin survives at theta = 0 or pi.
struct LegendreTable {
  int n_max = 0;
  std::vector<double> p, dp, p_over_sin;
  int idx(int m, int n) const { return m * (n_max + 1) + n; }
};

LegendreTable legendre_table(int n_max, double theta);

}  // namespace emchan::specfun
