// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <cmath>

namespace emchan {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;             // m/s
inline constexpr double kVacuumPermeability = 1.25663706212e-6;  // H/m
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

/// Free-space wavenumber at carrier frequency f_c (Hz).
inline double wavenumber(double f_c) { return 2.0 * kPi * f_c / kSpeedOfLight; }

inline double wavelength(double f_c) { return kSpeedOfLight / f_c; }

inline double angular_frequency(double f_c) { return 2.0 * kPi * f_c; }

/// dBm to linear power in the simulator's normalized units: the noise floor
/// N = 1 sits at 30 dBm, i.e. P[units] = 10^((dBm - 30)/10).
inline double dbm_to_power(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace emchan
