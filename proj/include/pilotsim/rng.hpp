// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <utility>

#include "pilotsim/math.hpp"

// Self-contained generators and distributions so that trajectories are
// bit-identical for a given seed on every platform (std distributions are
// implementation-defined). Substreams are derived by counter mixing, so any
// (realization, cell, slot) stream is reproducible without replaying history.

namespace pilotsim {

/// SplitMix64 finalizer; also used to derive substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

  private:
    std::uint64_t state_;
};

/// xoshiro256++ by Blackman and Vigna; state expanded from a 64-bit seed
/// with SplitMix64 per the reference seeding recipe.
class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) {
            word = sm.next();
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

/// Seed for a named substream of `master`. Tags are hashed in order, so
/// (master, {a, b}) and (master, {b, a}) are distinct streams.
inline std::uint64_t substream_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t tag : path) {
        s = mix64(s ^ mix64(tag + 0xD1B54A32D192ED03ULL));
    }
    return s;
}

/// Uniform double in [0, 1), 53-bit resolution.
inline double uniform_unit(Xoshiro256pp& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Xoshiro256pp& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(Xoshiro256pp& rng, std::uint64_t n) {
    const std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Pair of independent standard normals (Box-Muller).
inline std::pair<double, double> normal_pair(Xoshiro256pp& rng) {
    const double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
    const double u2 = uniform_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

/// Circularly symmetric complex Gaussian, E|z|^2 = variance.
inline cplx complex_gaussian(Xoshiro256pp& rng, double variance) {
    if (variance <= 0.0) {
        return {0.0, 0.0};
    }
    const auto [re, im] = normal_pair(rng);
    const double scale = std::sqrt(0.5 * variance);
    return {scale * re, scale * im};
}

}  // namespace pilotsim
