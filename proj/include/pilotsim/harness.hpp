// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pilotsim/estimators.hpp"
#include "pilotsim/math.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

/// Full experiment description. Defaults mirror the reference simulation
/// parameter table; see README for the key-by-key mapping.
struct SimConfig {
    double sigma_n2 = 0.2;
    std::size_t n_cells = 7;          // L
    std::size_t users_per_cell = 96;  // K
    std::size_t tau = 96;
    double mu = 1e-5;
    double nu = 100.0;
    double f_c = 1.8e9;
    std::size_t n_scatterers = 20;
    double t_s = 5e-4;
    double a0 = 0.5;
    cplx h_hat0{0.0, 0.0};
    cplx q0{0.0, 0.0};
    double p1 = 0.0;
    double s1 = 0.0;

    // Contamination strength: set at most one; neither set means
    // sigma_c2 = 0.6 (the reference operating point).
    std::optional<double> sigma_c2;
    std::optional<double> sir_db;

    std::vector<double> v_kmh = {1, 3, 10, 30, 50, 70, 100, 130};  // mobility axis
    std::vector<double> sir_grid_db = {-3, 0, 3, 6, 10};           // SIR axis
    ContaminationMode mode = ContaminationMode::kIdealized;
    bool hopping = true;
    std::size_t n_slots = 10000;
    std::size_t n_realizations = 100;
    std::size_t burn_in = 500;
    std::uint64_t master_seed = 12345;
    std::vector<EstimatorKind> estimators = {
        EstimatorKind::kLs, EstimatorKind::kMmse, EstimatorKind::kKalman,
        EstimatorKind::kModifiedKalman, EstimatorKind::kPredictor};
    double kalman_a = -1.0;  // fixed a for the conventional baseline; < 0 -> a0
    std::size_t workers = 0;  // 0 -> hardware concurrency
    double divergence_limit = 1e6;

    void validate() const;                 // throws std::invalid_argument
    double contamination_power() const;    // resolves sigma_c2 / sir_db
    double resolved_sir_db() const;
    TrackerConfig tracker_config() const;  // with grad_scale = tau
    CellTopology topology() const;
};

/// Per-slot squared errors of every configured estimator on one shared
/// observation stream.
struct RealizationResult {
    std::vector<std::vector<double>> sq_errors;  // [estimator][slot]
    std::vector<std::uint8_t> diverged;          // per estimator
    std::vector<double> final_a;                 // tracked a, NaN if not tracked
};

/// Runs one realization at cfg.v_kmh.front(). Deterministic in
/// (master_seed, realization_index); estimators all see the identical
/// (y, x, h_true) stream.
RealizationResult run_realization(const SimConfig& cfg, std::size_t realization_index);

struct MseStats {
    double mse = 0.0;
    double std_err = 0.0;
    std::size_t n_samples = 0;
};

/// Mean squared error over slots past burn_in, averaged across realizations;
/// std_err across per-realization means. Throws if any realization has no
/// post-burn-in window.
MseStats compute_mse(std::span<const std::vector<double>> per_realization_errors,
                     std::size_t burn_in);

enum class SweepAxis { kMobility, kSir };

struct SweepRow {
    std::string estimator;
    double v_kmh = 0.0;
    double sir_db = 0.0;
    double mse = 0.0;
    double std_err = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // deterministic (estimator, axis) order
    std::size_t diverged_realizations = 0;
};

/// One compute_mse row per (estimator, axis point). Realizations are
/// distributed across workers; aggregation reduces in fixed realization
/// order, so parallel and serial runs produce identical results.
SweepResult run_sweep(const SimConfig& cfg, SweepAxis axis,
                      std::ostream* progress = nullptr);

/// Fixed-a Kalman MSE over (a, v): the data behind the MSE surface plot.
struct SurfaceResult {
    std::vector<double> a_grid;
    std::vector<double> v_kmh;
    std::vector<double> mse;  // row-major [v][a]
};

SurfaceResult run_surface(const SimConfig& cfg, std::span<const double> a_grid,
                          std::ostream* progress = nullptr);

}  // namespace pilotsim
