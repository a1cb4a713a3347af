// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pilotsim/math.hpp"
#include "pilotsim/rng.hpp"

namespace pilotsim {

/// UE mobility expressed as a maximum Doppler shift.
struct DopplerParams {
    double v_mps = 0.0;
    double f_c = 1.8e9;
    double f_d = 0.0;

    static constexpr double kSpeedOfLight = 299792458.0;  // m/s
};

/// f_d = (v/c) * f_c. Throws std::invalid_argument for v < 0 or f_c <= 0.
double doppler_shift(double v_mps, double f_c);

DopplerParams make_doppler(double v_mps, double f_c);

inline double kmh_to_mps(double v_kmh) { return v_kmh / 3.6; }

/// Sum-of-scatterers flat-fading channel:
///   h(t) = N_s^{-1/2} sum_m exp(j(2 pi f_d t cos(alpha_m) + phi_m)),
/// with alpha_m, phi_m i.i.d. uniform on [-pi, pi). Immutable once built;
/// sampling is a pure function of (channel, t).
class ClarkeChannel {
  public:
    /// Draws the scatterer angles and phases from `rng`. Throws
    /// std::invalid_argument for n_scatterers == 0 or f_d < 0.
    ClarkeChannel(Xoshiro256pp& rng, std::size_t n_scatterers, double f_d);

    cplx sample(double t) const;

    std::size_t scatterer_count() const { return alpha_.size(); }
    double max_doppler() const { return f_d_; }
    std::span<const double> angles() const { return alpha_; }
    std::span<const double> phases() const { return phi_; }

  private:
    std::vector<double> alpha_;  // angles of arrival
    std::vector<double> phi_;    // initial phases
    std::vector<double> omega_;  // 2 pi f_d cos(alpha_m), cached
    double f_d_ = 0.0;
    double amplitude_ = 0.0;     // 1/sqrt(N_s)
};

inline ClarkeChannel clarke_init(Xoshiro256pp& rng, std::size_t n_scatterers, double f_d) {
    return ClarkeChannel(rng, n_scatterers, f_d);
}

inline cplx clarke_sample(const ClarkeChannel& ch, double t) { return ch.sample(t); }

/// Normalized autocorrelation of Clarke's model at lag dt: J0(2 pi f_d dt).
/// Throws std::invalid_argument for dt < 0.
double theoretical_autocorrelation(double f_d, double dt);

}  // namespace pilotsim
