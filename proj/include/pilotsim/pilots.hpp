// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotsim/math.hpp"
#include "pilotsim/rng.hpp"

namespace pilotsim {

/// K orthonormal pilot sequences of length tau, stored column-major.
/// Construction: columns of the tau-point DFT matrix scaled by 1/sqrt(tau),
/// so x_i^H x_i = 1 exactly and x_i^H x_j = 0 for i != j.
class PilotBook {
  public:
    /// Throws std::invalid_argument unless 1 <= n_sequences <= tau.
    PilotBook(std::size_t tau, std::size_t n_sequences);

    std::span<const cplx> column(std::size_t i) const;
    std::size_t tau() const { return tau_; }
    std::size_t size() const { return k_; }

  private:
    std::size_t tau_ = 0;
    std::size_t k_ = 0;
    std::vector<cplx> data_;
};

inline PilotBook make_pilot_book(std::size_t tau, std::size_t n_sequences) {
    return PilotBook(tau, n_sequences);
}

/// One slot's pilot permutation: user index -> pilot index, plus inverse.
struct HopAssignment {
    std::size_t slot = 0;
    std::vector<std::uint32_t> user_to_pilot;
    std::vector<std::uint32_t> pilot_to_user;

    std::size_t pilot_of(std::size_t user) const { return user_to_pilot[user]; }
    std::size_t user_of(std::size_t pilot) const { return pilot_to_user[pilot]; }
};

/// Uniform random permutation (Fisher-Yates) over n_pilots pilots.
HopAssignment hop(Xoshiro256pp& rng, std::size_t n_pilots, std::size_t slot = 0);

/// Identity assignment, i.e. hopping disabled (collision distance 1).
HopAssignment fixed_assignment(std::size_t n_pilots, std::size_t slot = 0);

/// P(t_c = d) = (1 - 1/K)^(d-1) * 1/K. Throws for d < 1 or K < 1.
double collision_pmf(std::uint64_t d, std::size_t n_pilots);

/// E[t_c] = K.
double expected_collision_distance(std::size_t n_pilots);

/// Draws one foreign user's pilot uniformly per slot and records the gaps
/// between slots where it matches the pilot of the user of interest.
/// Throws for n_slots < 2 or K < 1.
std::vector<std::uint64_t> simulate_collision_distances(Xoshiro256pp& rng,
                                                        std::size_t n_pilots,
                                                        std::size_t n_slots);

}  // namespace pilotsim
