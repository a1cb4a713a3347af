// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pilotsim {

double doppler_shift(double v_mps, double f_c) {
    if (!(v_mps >= 0.0)) {
        throw std::invalid_argument("doppler_shift: UE speed must be >= 0, got " +
                                    std::to_string(v_mps));
    }
    if (!(f_c > 0.0)) {
        throw std::invalid_argument("doppler_shift: carrier frequency must be > 0, got " +
                                    std::to_string(f_c));
    }
    return v_mps / DopplerParams::kSpeedOfLight * f_c;
}

DopplerParams make_doppler(double v_mps, double f_c) {
    return DopplerParams{v_mps, f_c, doppler_shift(v_mps, f_c)};
}

ClarkeChannel::ClarkeChannel(Xoshiro256pp& rng, std::size_t n_scatterers, double f_d)
    : f_d_(f_d) {
    if (n_scatterers == 0) {
        throw std::invalid_argument("ClarkeChannel: need at least one scatterer");
    }
    if (!(f_d >= 0.0)) {
        throw std::invalid_argument("ClarkeChannel: Doppler shift must be >= 0");
    }
    alpha_.resize(n_scatterers);
    phi_.resize(n_scatterers);
    omega_.resize(n_scatterers);
    for (std::size_t m = 0; m < n_scatterers; ++m) {
        alpha_[m] = uniform_range(rng, -kPi, kPi);
        phi_[m] = uniform_range(rng, -kPi, kPi);
        omega_[m] = kTwoPi * f_d_ * std::cos(alpha_[m]);
    }
    amplitude_ = 1.0 / std::sqrt(static_cast<double>(n_scatterers));
}

cplx ClarkeChannel::sample(double t) const {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t m = 0; m < alpha_.size(); ++m) {
        const double arg = omega_[m] * t + phi_[m];
        re += std::cos(arg);
        im += std::sin(arg);
    }
    return {amplitude_ * re, amplitude_ * im};
}

double theoretical_autocorrelation(double f_d, double dt) {
    if (!(dt >= 0.0)) {
        throw std::invalid_argument("theoretical_autocorrelation: lag must be >= 0");
    }
    return bessel_j0(kTwoPi * f_d * dt);
}

}  // namespace pilotsim
