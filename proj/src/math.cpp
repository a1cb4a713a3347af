// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/math.hpp"

#include <cmath>
#include <cstddef>

namespace pilotsim {

namespace {

// P/Q rational evaluation, coefficients in ascending order, equal length.
template <std::size_t N>
double rational(const double (&p)[N], const double (&q)[N], double y) {
    double num = p[N - 1];
    double den = q[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        num = num * y + p[i];
        den = den * y + q[i];
    }
    return num / den;
}

// Coefficient sets for the classical double-precision J0 approximation
// (Hart/Zhang style): two root-bracketing rational fits below 8 and the
// cos/sin amplitude pair of the Hankel expansion above.
constexpr double kP1[] = {
    -4.1298668500990866786e+11, 2.7282507878605942706e+10,
    -6.2140700423540120665e+08, 6.6302997904833794242e+06,
    -3.6629814655107086448e+04, 1.0344222815443188943e+02,
    -1.2117036164593528341e-01};
constexpr double kQ1[] = {
    2.3883787996332290397e+12, 2.6328198300859648632e+10,
    1.3985097372263433271e+08, 4.5612696224219938200e+05,
    9.3614022392337710626e+02, 1.0, 0.0};

constexpr double kP2[] = {
    -1.8319397969392084011e+03, -1.2254078161378989535e+04,
    -7.2879702464464618998e+03, 1.0341910641583726701e+04,
    1.1725046279757103576e+04,  4.4176707025325087628e+03,
    7.4321196680624245801e+02,  4.8591703355916499363e+01};
constexpr double kQ2[] = {
    -3.5783478026152301072e+05, 2.4599102262586308984e+05,
    -8.4055062591169562211e+04, 1.8680990008359188352e+04,
    -2.9458766545509337327e+03, 3.3307310774649071172e+02,
    -2.5258076240801555057e+01, 1.0};

constexpr double kPc[] = {
    2.2779090197304684302e+04, 4.1345386639580765797e+04,
    2.1170523380864944322e+04, 3.4806486443249270347e+03,
    1.5376201909008354296e+02, 8.8961548424210455236e-01};
constexpr double kQc[] = {
    2.2779090197304684318e+04, 4.1370412495510416640e+04,
    2.1215350561880115730e+04, 3.5028735138235608207e+03,
    1.5711159858080893649e+02, 1.0};

constexpr double kPs[] = {
    -8.9226600200800094098e+01, -1.8591953644342993800e+02,
    -1.1183429920482737611e+02, -2.2300261666214198472e+01,
    -1.2441026745835638459e+00, -8.8033303048680751817e-03};
constexpr double kQs[] = {
    5.7105024128512061905e+03, 1.1951131543434613647e+04,
    7.2642780169211018836e+03, 1.4887231232283756582e+03,
    9.0593769594993125859e+01, 1.0};

// First two positive roots of J0, split for accurate root subtraction.
constexpr double kX1 = 2.4048255576957727686e+00;
constexpr double kX11 = 6.160e+02;
constexpr double kX12 = -1.42444230422723137837e-03;
constexpr double kX2 = 5.5200781102863106496e+00;
constexpr double kX21 = 1.4130e+03;
constexpr double kX22 = 5.46860286310649596604e-04;

constexpr double kOneDivRootPi = 5.641895835477562869480795e-01;

}  // namespace

double bessel_j0(double x) {
    x = std::fabs(x);
    if (x == 0.0) {
        return 1.0;
    }
    if (x <= 4.0) {
        const double r = rational(kP1, kQ1, x * x);
        return (x + kX1) * ((x - kX11 / 256.0) - kX12) * r;
    }
    if (x <= 8.0) {
        const double r = rational(kP2, kQ2, 1.0 - x * x / 64.0);
        return (x + kX2) * ((x - kX21 / 256.0) - kX22) * r;
    }
    const double y = 8.0 / x;
    const double y2 = y * y;
    const double rc = rational(kPc, kQc, y2);
    const double rs = rational(kPs, kQs, y2);
    const double factor = kOneDivRootPi / std::sqrt(x);
    // rc*cos(x - pi/4) - y*rs*sin(x - pi/4), expanded via angle addition.
    const double sx = std::sin(x);
    const double cx = std::cos(x);
    return factor * (rc * (cx + sx) - y * rs * (sx - cx));
}

}  // namespace pilotsim
