// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotsim/channel.hpp"
#include "pilotsim/math.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/rng.hpp"

namespace pilotsim {

enum class ContaminationMode {
    kIdealized,  // aggregate contaminant redrawn i.i.d. per slot
    kExplicit,   // L-1 neighbor cells with hopping Clarke-channel users
};

struct CellTopology {
    std::size_t n_cells = 7;          // L
    std::size_t users_per_cell = 96;  // K
    ContaminationMode mode = ContaminationMode::kIdealized;
    double sigma_c2 = 0.6;  // total contamination power, average over time
    double sigma_n2 = 0.2;  // noise variance per complex entry

    void validate() const;  // throws std::invalid_argument
};

/// Received pilot vector for one slot, plus ground truth for metrics.
struct SlotObservation {
    std::size_t slot = 0;
    std::vector<cplx> y;
    std::span<const cplx> x;  // pilot of the user of interest (a PilotBook column)
    cplx h_true{0.0, 0.0};
};

/// sigma_c^2 = 10^(-sir_db/10) under unit desired-signal power. +inf maps to 0.
double sir_to_sigma_c(double sir_db);
double sigma_c_to_sir_db(double sigma_c2);

/// Aggregate contamination coefficient with zero slot-to-slot correlation:
/// one CN(0, sigma_c2) draw per call.
inline cplx idealized_contaminator(Xoshiro256pp& rng, double sigma_c2) {
    return complex_gaussian(rng, sigma_c2);
}

/// y = h x + (sum_i h'_i) x + z with z_j i.i.d. CN(0, sigma_n2).
/// All contaminators ride on the same pilot x (the contaminating set).
SlotObservation build_slot_observation(cplx h, std::span<const cplx> contaminators,
                                       std::span<const cplx> x, double sigma_n2,
                                       Xoshiro256pp& rng, std::size_t slot = 0);

/// One neighbor cell in explicit mode: K users with evolving Clarke channels.
struct NeighborCell {
    std::vector<ClarkeChannel> users;
};

/// Per-neighbor-cell contaminator coefficients at time t: the channel of the
/// unique user holding `pilot_index` in each cell, scaled by
/// sqrt(sigma_c2/(L-1)) so the total average contamination power is sigma_c2.
/// Throws std::out_of_range for a bad pilot index.
std::vector<cplx> explicit_contaminators(const CellTopology& topology,
                                         std::span<const NeighborCell> cells,
                                         std::span<const HopAssignment> assignments,
                                         std::size_t pilot_index, double t);

/// Owns the L-1 neighbor cells of the explicit mode and their hop schedules.
/// Slot assignments are derived from (master_seed, realization, cell, slot),
/// so any slot is reproducible without replaying history.
class NeighborField {
  public:
    NeighborField(const CellTopology& topology, std::uint64_t master_seed,
                  std::uint64_t realization, std::size_t n_scatterers, double f_d,
                  bool hopping, double t_s);

    /// Contaminators seen by `pilot_index` in the given slot.
    std::vector<cplx> contaminators_at(std::size_t slot, std::size_t pilot_index) const;

    std::span<const NeighborCell> cells() const { return cells_; }
    HopAssignment assignment(std::size_t cell, std::size_t slot) const;

  private:
    CellTopology topology_;
    std::vector<NeighborCell> cells_;
    std::uint64_t master_seed_ = 0;
    std::uint64_t realization_ = 0;
    bool hopping_ = true;
    double t_s_ = 5e-4;
};

}  // namespace pilotsim
