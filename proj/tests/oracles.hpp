// SPDX-License-Identifier: Apache-2.0
//
// Test-side oracles, kept independent of the library's fast paths: dense
// tau x tau linear solves (Eigen) for the rank-one identities, and plain
// central finite differences for the derivative recursions.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pilotsim/math.hpp"
#include "pilotsim/rng.hpp"

namespace pilotsim::testing {

/// k = p x^H R^-1 with R = x p x^H + sigma_n2 I + sigma_c2 x x^H, via a
/// dense Hermitian solve.
std::vector<cplx> naive_kalman_gain(std::span<const cplx> x, double p, double sigma_n2,
                                    double sigma_c2);

/// m = (1 - k x) s x^H R^-1 via the same dense solve.
std::vector<cplx> naive_m_vector(std::span<const cplx> x, double p, double s,
                                 double sigma_n2, double sigma_c2);

/// x^H (x x^H + sigma_n2 I + sigma_c2 x x^H)^-1 y via a dense solve.
cplx naive_mmse(std::span<const cplx> x, std::span<const cplx> y, double sigma_n2,
                double sigma_c2);

std::vector<cplx> random_unit_pilot(Xoshiro256pp& rng, std::size_t tau);

}  // namespace pilotsim::testing
