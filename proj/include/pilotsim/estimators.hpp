// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pilotsim/math.hpp"

namespace pilotsim {

/// Kalman/tracker state carried between slots. `p` and `s` refer to the
/// predicted error covariance for the *next* slot and its a-derivative,
/// matching the p_{n+1}/s_{n+1} indexing of the recursions.
struct FilterState {
    cplx h_hat{0.0, 0.0};  // channel estimate
    double a = 0.5;        // tracked AR(1) coefficient, in [0, 1]
    double p = 0.0;        // predicted error covariance
    cplx q{0.0, 0.0};      // d h_hat / d a
    double s = 0.0;        // d p / d a
    std::size_t n = 0;     // slots processed
};

struct TrackerConfig {
    double mu = 1e-5;       // gradient step size
    double nu = 100.0;      // derivative cap (applied to the scaled gradient)
    double sigma_n2 = 0.2;
    double sigma_c2 = 0.6;
    // The mu/nu calibration assumes the gradient scale of per-symbol
    // unit-power pilots (||x||^2 = tau); with unit-norm pilots the raw
    // innovation correlation is tau times smaller, so the applied gradient
    // is grad_scale * Re(grad). Set to the pilot length.
    double grad_scale = 96.0;
    double a0 = 0.5;
    cplx h_hat0{0.0, 0.0};
    cplx q0{0.0, 0.0};
    double p1 = 0.0;
    double s1 = 0.0;

    FilterState initial_state() const;
    void validate() const;  // throws std::invalid_argument
};

/// Per-step transients exposed for testing and diagnostics. The gain and
/// derivative vectors are multiples of x^H; only their scalar factors are
/// kept: k = gain * x^H and m = m_scalar * x^H.
struct StepInfo {
    cplx estimate{0.0, 0.0};    // slot-n output of the estimator
    cplx innovation{0.0, 0.0};  // x^H e
    double gain = 0.0;          // k x
    double m_scalar = 0.0;      // d(k x)/da factor (modified step only)
    cplx grad{0.0, 0.0};        // raw gradient before cap/scale (modified step only)
    double grad_applied = 0.0;  // capped, scaled gradient used in the a update
};

/// (x^H x)^-1 x^H y. Works for any nonzero pilot. Throws on a zero pilot
/// or mismatched lengths.
cplx ls_estimate(std::span<const cplx> x, std::span<const cplx> y);

/// x^H (x x^H + sigma_n2 I + sigma_c2 x x^H)^-1 y for unit-norm x, reduced
/// through the rank-one inversion identity to x^H y / (1 + sigma_c2 + sigma_n2).
/// With both variances zero this is exactly the LS estimate.
cplx mmse_estimate(std::span<const cplx> x, std::span<const cplx> y, double sigma_n2,
                   double sigma_c2);

/// Conventional Kalman step with known AR coefficient, unit-norm pilot.
/// R^-1 is applied through the rank-one identity: k x = p/(sigma_n2 + p + sigma_c2).
StepInfo kalman_step(FilterState& state, std::span<const cplx> x, std::span<const cplx> y,
                     double a_known, double sigma_n2, double sigma_c2);

/// Full tracker step: gradient, capped a update, filter update and the
/// derivative recursions (q, m, s), ordered as in the AR-tracking algorithm,
/// with right-hand sides reading pre-update quantities.
StepInfo modified_kalman_step(FilterState& state, std::span<const cplx> x,
                              std::span<const cplx> y, const TrackerConfig& cfg);

/// Same recursions as modified_kalman_step, but reports the prediction
/// a_n * h_hat_{n-1} (before the measurement update) as the slot-n estimate.
StepInfo predictor_step(FilterState& state, std::span<const cplx> x,
                        std::span<const cplx> y, const TrackerConfig& cfg);

enum class EstimatorKind {
    kLs,
    kMmse,
    kKalman,          // conventional, fixed AR coefficient
    kModifiedKalman,  // AR tracker, filtered output
    kPredictor,       // AR tracker, prediction output
    kRunningAverage,  // mean of matched-filter outputs
};

std::string estimator_name(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);  // throws on unknown name

/// Streaming per-slot estimator; one instance per realization.
class SlotEstimator {
  public:
    virtual ~SlotEstimator() = default;
    virtual cplx update(std::span<const cplx> x, std::span<const cplx> y) = 0;
    virtual EstimatorKind kind() const = 0;
    /// Tracked AR coefficient, if this estimator has one (NaN otherwise).
    virtual double tracked_a() const;
};

std::unique_ptr<SlotEstimator> make_estimator(EstimatorKind kind, const TrackerConfig& cfg,
                                              double kalman_fixed_a);

struct GridSearchParams {
    double f_c = 1.8e9;
    double t_s = 5e-4;
    std::size_t n_scatterers = 20;
    std::size_t burn_in = 500;
    // Uninformed prior for the grid runs: at a = 1 exactly, p1 = 0 is an
    // absorbing state (zero gain forever), which would poison the a = 1
    // grid point.
    double p1 = 1.0;
    std::uint64_t seed = 1;
};

struct GridSearchResult {
    std::vector<double> grid;
    std::vector<double> mse;
    std::size_t best_index = 0;
    double best_a = 0.0;
};

/// MSE of the fixed-a conventional Kalman filter over a grid of AR
/// coefficients, Monte Carlo averaged; the oracle for tracker convergence.
/// Throws on an empty grid or grid values outside [0, 1].
GridSearchResult grid_optimal_a(double v_kmh, double sigma_n2, double sigma_c2,
                                std::span<const double> grid, std::size_t n_slots,
                                std::size_t n_realizations,
                                const GridSearchParams& params = {});

}  // namespace pilotsim
