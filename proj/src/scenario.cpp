// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pilotsim {

namespace {

// Substream tags; keep stable so that seeds stay reproducible across versions.
constexpr std::uint64_t kTagNeighborChannel = 0x4E45u;  // neighbor user channels
constexpr std::uint64_t kTagHop = 0x484Fu;              // per-(cell, slot) hops

}  // namespace

void CellTopology::validate() const {
    if (n_cells < 1) {
        throw std::invalid_argument("CellTopology: need at least one cell");
    }
    if (users_per_cell < 1) {
        throw std::invalid_argument("CellTopology: need at least one user per cell");
    }
    if (!(sigma_c2 >= 0.0)) {
        throw std::invalid_argument("CellTopology: sigma_c2 must be >= 0");
    }
    if (!(sigma_n2 >= 0.0)) {
        throw std::invalid_argument("CellTopology: sigma_n2 must be >= 0");
    }
}

double sir_to_sigma_c(double sir_db) {
    if (std::isinf(sir_db) && sir_db > 0.0) {
        return 0.0;  // "no interference" flag
    }
    return std::pow(10.0, -sir_db / 10.0);
}

double sigma_c_to_sir_db(double sigma_c2) {
    if (sigma_c2 <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -10.0 * std::log10(sigma_c2);
}

SlotObservation build_slot_observation(cplx h, std::span<const cplx> contaminators,
                                       std::span<const cplx> x, double sigma_n2,
                                       Xoshiro256pp& rng, std::size_t slot) {
    cplx total = h;
    for (const cplx& hc : contaminators) {
        total += hc;
    }
    SlotObservation obs;
    obs.slot = slot;
    obs.x = x;
    obs.h_true = h;
    obs.y.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        obs.y[j] = total * x[j] + complex_gaussian(rng, sigma_n2);
    }
    return obs;
}

std::vector<cplx> explicit_contaminators(const CellTopology& topology,
                                         std::span<const NeighborCell> cells,
                                         std::span<const HopAssignment> assignments,
                                         std::size_t pilot_index, double t) {
    if (cells.size() != assignments.size()) {
        throw std::invalid_argument("explicit_contaminators: one assignment per cell required");
    }
    std::vector<cplx> result;
    result.reserve(cells.size());
    if (cells.empty()) {
        return result;  // single-cell system, no neighbors
    }
    const double scale =
        std::sqrt(topology.sigma_c2 / static_cast<double>(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (pilot_index >= assignments[c].pilot_to_user.size()) {
            throw std::out_of_range("explicit_contaminators: pilot index " +
                                    std::to_string(pilot_index) + " out of range");
        }
        const std::size_t user = assignments[c].user_of(pilot_index);
        result.push_back(scale * cells[c].users[user].sample(t));
    }
    return result;
}

NeighborField::NeighborField(const CellTopology& topology, std::uint64_t master_seed,
                             std::uint64_t realization, std::size_t n_scatterers,
                             double f_d, bool hopping, double t_s)
    : topology_(topology),
      master_seed_(master_seed),
      realization_(realization),
      hopping_(hopping),
      t_s_(t_s) {
    topology_.validate();
    if (topology_.n_cells < 2) {
        return;  // no neighbors, nothing to build
    }
    cells_.resize(topology_.n_cells - 1);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        cells_[c].users.reserve(topology_.users_per_cell);
        for (std::size_t u = 0; u < topology_.users_per_cell; ++u) {
            Xoshiro256pp rng(substream_seed(
                master_seed_, {kTagNeighborChannel, realization_, c + 1, u}));
            cells_[c].users.emplace_back(rng, n_scatterers, f_d);
        }
    }
}

HopAssignment NeighborField::assignment(std::size_t cell, std::size_t slot) const {
    if (!hopping_) {
        return fixed_assignment(topology_.users_per_cell, slot);
    }
    // cell + 1: tag 0 is reserved for the cell of interest.
    Xoshiro256pp rng(substream_seed(master_seed_, {kTagHop, realization_, cell + 1, slot}));
    return hop(rng, topology_.users_per_cell, slot);
}

std::vector<cplx> NeighborField::contaminators_at(std::size_t slot,
                                                  std::size_t pilot_index) const {
    std::vector<HopAssignment> assignments;
    assignments.reserve(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        assignments.push_back(assignment(c, slot));
    }
    return explicit_contaminators(topology_, cells_, assignments, pilot_index,
                                  static_cast<double>(slot) * t_s_);
}

}  // namespace pilotsim
