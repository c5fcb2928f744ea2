// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan/specfun.hpp"

#include <cmath>

#include "emchan/constants.hpp"
#include "emchan/error.hpp"

namespace emchan::specfun {

namespace {

void check_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw_error(ErrorKind::domain, std::string(who) + ": non-finite argument");
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) throw_error(ErrorKind::domain, "bessel_j: order must be non-negative");
  check_finite(x, "bessel_j");
  if (x < 0.0) throw_error(ErrorKind::domain, "bessel_j: x must be >= 0");
  return std::cyl_bessel_j(static_cast<double>(n), x);
}

void spherical_j_array(int n_max, double x, std::vector<double>& out) {
  check_finite(x, "spherical_j");
  if (x < 0.0) throw_error(ErrorKind::domain, "spherical_j: x must be >= 0");
  out.assign(n_max + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;  // j_0(0) = 1, j_n(0) = 0 for n >= 1
    return;
  }
  out[0] = std::sin(x) / x;
  if (n_max == 0) return;
  if (x < 1e-3) {
    // Tiny argument: the leading series term j_n = x^n / (2n+1)!! is accurate
    // to ~x^2 relative; downward recurrence would just renormalize noise.
    double dfact = 1.0;  // (2n+1)!!
    double xn = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      dfact *= (2.0 * n + 1.0);
      xn *= x;
      out[n] = xn / dfact * (1.0 - x * x / (2.0 * (2.0 * n + 3.0)));
    }
    return;
  }
  // Miller's downward recurrence. The start index must sit well past the
  // turning point n ~ x for the minimal solution to dominate.
  double top = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(std::ceil(top + 16.0 + 2.0 * std::sqrt(top)));
  double fp = 0.0;     // f_{k+1}
  double fc = 1e-290;  // f_k
  std::vector<double> tmp(n_max + 1, 0.0);
  for (int k = start; k >= 1; --k) {
    double fm = (2.0 * k + 1.0) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (k - 1 <= n_max) tmp[k - 1] = fc;
    if (std::abs(fc) > 1e250) {
      double s = 1e-250;
      fc *= s;
      fp *= s;
      for (int i = std::min(k - 1, n_max); i <= n_max; ++i) tmp[i] *= s;
    }
  }
  // Normalize against whichever low-order closed form is away from a zero.
  double j0 = out[0];
  double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  double scale = (std::abs(j0) >= std::abs(j1)) ? j0 / tmp[0] : j1 / tmp[1];
  out[0] = j0;
  for (int n = 1; n <= n_max; ++n) out[n] = tmp[n] * scale;
}

void spherical_y_array(int n_max, double x, std::vector<double>& out) {
  check_finite(x, "spherical_y");
  if (x <= 0.0) throw_error(ErrorKind::singularity, "spherical_y: singular at x <= 0");
  out.assign(n_max + 1, 0.0);
  out[0] = -std::cos(x) / x;
  if (n_max == 0) return;
  out[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 2; n <= n_max; ++n) {
    out[n] = (2.0 * n - 1.0) / x * out[n - 1] - out[n - 2];
  }
}

double spherical_j(int n, double x) {
  std::vector<double> buf;
  spherical_j_array(n, x, buf);
  return buf[n];
}

double spherical_y(int n, double x) {
  std::vector<double> buf;
  spherical_y_array(n, x, buf);
  return buf[n];
}

std::complex<double> spherical_h1(int n, double x) {
  return {spherical_j(n, x), spherical_y(n, x)};
}

double spherical_j_deriv(int n, double x) {
  if (n == 0) return -spherical_j(1, x);
  std::vector<double> buf;
  spherical_j_array(n, x, buf);
  return buf[n - 1] - (n + 1.0) / x * buf[n];
}

double spherical_y_deriv(int n, double x) {
  if (n == 0) return -spherical_y(1, x);
  std::vector<double> buf;
  spherical_y_array(n, x, buf);
  return buf[n - 1] - (n + 1.0) / x * buf[n];
}

double assoc_legendre(int n, int m, double x) {
  if (n < 0 || m < 0 || m > n) throw_error(ErrorKind::domain, "assoc_legendre: need 0 <= m <= n");
  check_finite(x, "assoc_legendre");
  if (x < -1.0 || x > 1.0) throw_error(ErrorKind::domain, "assoc_legendre: |x| must be <= 1");
  // P_m^m = (2m-1)!! (1-x^2)^{m/2}, then upward in degree.
  double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * somx2;
  if (n == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (n == m + 1) return pmmp1;
  double pnn = 0.0;
  for (int nn = m + 2; nn <= n; ++nn) {
    pnn = ((2.0 * nn - 1.0) * x * pmmp1 - (nn + m - 1.0) * pmm) / (nn - m);
    pmm = pmmp1;
    pmmp1 = pnn;
  }
  return pnn;
}

std::complex<double> spherical_harmonic(int n, int m, double theta, double phi) {
  Order o{n, m};
  if (!o.valid()) throw_error(ErrorKind::domain, "spherical_harmonic: invalid (n, m)");
  check_finite(theta, "spherical_harmonic");
  check_finite(phi, "spherical_harmonic");
  int mm = std::abs(m);
  double log_ratio = std::lgamma(n - mm + 1.0) - std::lgamma(n + mm + 1.0);
  double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * kPi) * std::exp(log_ratio));
  double pval = assoc_legendre(n, mm, std::cos(theta));
  return norm * pval * std::exp(std::complex<double>(0.0, m * phi));
}

LegendreTable legendre_table(int n_max, double theta) {
  LegendreTable t;
  t.n_max = n_max;
  int sz = (n_max + 1) * (n_max + 1);
  t.p.assign(sz, 0.0);
  t.dp.assign(sz, 0.0);
  t.p_over_sin.assign(sz, 0.0);

  double x = std::cos(theta);
  double s = std::sin(theta);
  const double inv4pi = 1.0 / (4.0 * kPi);

  if (std::abs(s) < 1e-12) {
    // Pole limits. P_n(±1) = (±1)^n; the m = 1 column of P_n^1/sin and
    // dP_n^1/dtheta tends to ±A_n1 n(n+1)/2, every other column vanishes.
    bool north = x > 0.0;
    for (int n = 0; n <= n_max; ++n) {
      double a_n0 = std::sqrt((2.0 * n + 1.0) * inv4pi);
      t.p[t.idx(0, n)] = a_n0 * (north ? 1.0 : ((n % 2) ? -1.0 : 1.0));
    }
    for (int n = 1; n <= n_max; ++n) {
      double a_n1 = std::sqrt((2.0 * n + 1.0) * inv4pi / (n * (n + 1.0)));
      double lim = a_n1 * 0.5 * n * (n + 1.0);
      double sign_pos = north ? 1.0 : ((n % 2) ? 1.0 : -1.0);   // P_n^1/sin at -1: (-1)^{n+1}
      double sign_dp = north ? 1.0 : ((n % 2) ? -1.0 : 1.0);    // dP_n^1/dtheta at -1: (-1)^n
      t.p_over_sin[t.idx(1, n)] = lim * sign_pos;
      t.dp[t.idx(1, n)] = lim * sign_dp;
    }
    return t;
  }

  // Diagonal seed, then upward in n for each m.
  t.p[t.idx(0, 0)] = std::sqrt(inv4pi);
  for (int m = 1; m <= n_max; ++m) {
    t.p[t.idx(m, m)] =
        t.p[t.idx(m - 1, m - 1)] * s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  }
  for (int m = 0; m <= n_max; ++m) {
    if (m + 1 <= n_max) {
      t.p[t.idx(m, m + 1)] = x * std::sqrt(2.0 * m + 3.0) * t.p[t.idx(m, m)];
    }
    for (int n = m + 2; n <= n_max; ++n) {
      double alpha = std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - m * m));
      double beta = std::sqrt(((2.0 * n + 1.0) * (n - 1.0 - m) * (n - 1.0 + m)) /
                              ((2.0 * n - 3.0) * (n - m) * (n + m)));
      t.p[t.idx(m, n)] = alpha * x * t.p[t.idx(m, n - 1)] - beta * t.p[t.idx(m, n - 2)];
    }
  }
  for (int m = 0; m <= n_max; ++m) {
    for (int n = m; n <= n_max; ++n) {
      double pn = t.p[t.idx(m, n)];
      t.p_over_sin[t.idx(m, n)] = pn / s;
      double prev = (n > m) ? t.p[t.idx(m, n - 1)] : 0.0;
      double c = (n > m)
                     ? std::sqrt((static_cast<double>(n) * n - m * m) * (2.0 * n + 1.0) /
                                 (2.0 * n - 1.0))
                     : 0.0;
      t.dp[t.idx(m, n)] = (n * x * pn - c * prev) / s;
    }
  }
  return t;
}

}  // namespace emchan::specfun
