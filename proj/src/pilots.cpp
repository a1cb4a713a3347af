// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/pilots.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pilotsim {

PilotBook::PilotBook(std::size_t tau, std::size_t n_sequences)
    : tau_(tau), k_(n_sequences) {
    if (tau == 0 || n_sequences == 0) {
        throw std::invalid_argument("PilotBook: tau and K must be >= 1");
    }
    if (n_sequences > tau) {
        throw std::invalid_argument("PilotBook: K=" + std::to_string(n_sequences) +
                                    " exceeds pilot length tau=" + std::to_string(tau));
    }
    data_.resize(tau_ * k_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tau_));
    for (std::size_t col = 0; col < k_; ++col) {
        for (std::size_t row = 0; row < tau_; ++row) {
            const double arg = -kTwoPi * static_cast<double>(col) *
                               static_cast<double>(row) / static_cast<double>(tau_);
            data_[col * tau_ + row] = cplx(scale * std::cos(arg), scale * std::sin(arg));
        }
    }
}

std::span<const cplx> PilotBook::column(std::size_t i) const {
    if (i >= k_) {
        throw std::out_of_range("PilotBook: pilot index " + std::to_string(i) +
                                " out of range (K=" + std::to_string(k_) + ")");
    }
    return {data_.data() + i * tau_, tau_};
}

namespace {

HopAssignment identity(std::size_t n_pilots, std::size_t slot) {
    HopAssignment a;
    a.slot = slot;
    a.user_to_pilot.resize(n_pilots);
    a.pilot_to_user.resize(n_pilots);
    std::iota(a.user_to_pilot.begin(), a.user_to_pilot.end(), 0u);
    std::iota(a.pilot_to_user.begin(), a.pilot_to_user.end(), 0u);
    return a;
}

}  // namespace

HopAssignment hop(Xoshiro256pp& rng, std::size_t n_pilots, std::size_t slot) {
    if (n_pilots == 0) {
        throw std::invalid_argument("hop: need at least one pilot");
    }
    HopAssignment a = identity(n_pilots, slot);
    for (std::size_t i = n_pilots - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
        std::swap(a.user_to_pilot[i], a.user_to_pilot[j]);
    }
    for (std::uint32_t user = 0; user < n_pilots; ++user) {
        a.pilot_to_user[a.user_to_pilot[user]] = user;
    }
    return a;
}

HopAssignment fixed_assignment(std::size_t n_pilots, std::size_t slot) {
    if (n_pilots == 0) {
        throw std::invalid_argument("fixed_assignment: need at least one pilot");
    }
    return identity(n_pilots, slot);
}

double collision_pmf(std::uint64_t d, std::size_t n_pilots) {
    if (d < 1) {
        throw std::invalid_argument("collision_pmf: distance must be >= 1");
    }
    if (n_pilots < 1) {
        throw std::invalid_argument("collision_pmf: need at least one pilot");
    }
    const double p = 1.0 / static_cast<double>(n_pilots);
    return std::pow(1.0 - p, static_cast<double>(d - 1)) * p;
}

double expected_collision_distance(std::size_t n_pilots) {
    if (n_pilots < 1) {
        throw std::invalid_argument("expected_collision_distance: need at least one pilot");
    }
    return static_cast<double>(n_pilots);
}

std::vector<std::uint64_t> simulate_collision_distances(Xoshiro256pp& rng,
                                                        std::size_t n_pilots,
                                                        std::size_t n_slots) {
    if (n_pilots < 1) {
        throw std::invalid_argument("simulate_collision_distances: need at least one pilot");
    }
    if (n_slots < 2) {
        throw std::invalid_argument("simulate_collision_distances: need at least two slots");
    }
    std::vector<std::uint64_t> distances;
    bool seen_first = false;
    std::uint64_t last_collision = 0;
    for (std::uint64_t n = 0; n < n_slots; ++n) {
        // The foreign user collides iff its uniformly re-drawn pilot equals
        // the pilot of the user of interest; that event has probability 1/K
        // regardless of the pilot the user of interest hopped to.
        const bool collide = uniform_below(rng, n_pilots) == 0;
        if (!collide) {
            continue;
        }
        if (seen_first) {
            distances.push_back(n - last_collision);
        }
        seen_first = true;
        last_collision = n;
    }
    return distances;
}

}  // namespace pilotsim
