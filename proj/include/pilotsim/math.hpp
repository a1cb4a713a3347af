// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <complex>

namespace pilotsim {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Bessel function of the first kind, order zero. Minimax rational
/// approximations on root-bracketing intervals for |x| <= 8, Hankel
/// asymptotic expansion beyond. Absolute error below 1e-13.
double bessel_j0(double x);

}  // namespace pilotsim
