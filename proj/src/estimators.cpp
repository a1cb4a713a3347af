// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pilotsim/channel.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

namespace {

constexpr double kUnitNormTol = 1e-6;

struct Projection {
    cplx xy;         // x^H y
    double x_norm2;  // ||x||^2
};

Projection project(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("estimator: pilot and observation lengths differ");
    }
    if (x.empty()) {
        throw std::invalid_argument("estimator: empty pilot");
    }
    cplx acc{0.0, 0.0};
    double n2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        acc += std::conj(x[j]) * y[j];
        n2 += std::norm(x[j]);
    }
    return {acc, n2};
}

cplx unit_projection(std::span<const cplx> x, std::span<const cplx> y) {
    const Projection pr = project(x, y);
    if (std::fabs(pr.x_norm2 - 1.0) > kUnitNormTol) {
        throw std::invalid_argument("estimator: pilot is not unit norm (||x||^2 = " +
                                    std::to_string(pr.x_norm2) + ")");
    }
    return pr.xy;
}

void check_finite(const FilterState& st) {
    const bool ok = std::isfinite(st.h_hat.real()) && std::isfinite(st.h_hat.imag()) &&
                    std::isfinite(st.a) && std::isfinite(st.p) &&
                    std::isfinite(st.q.real()) && std::isfinite(st.q.imag()) &&
                    std::isfinite(st.s);
    if (!ok) {
        throw std::runtime_error("kalman filter diverged to a non-finite state at slot " +
                                 std::to_string(st.n));
    }
    if (st.p < 0.0) {
        throw std::runtime_error("kalman filter error covariance went negative at slot " +
                                 std::to_string(st.n));
    }
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

FilterState TrackerConfig::initial_state() const {
    FilterState st;
    st.h_hat = h_hat0;
    st.a = a0;
    st.p = p1;
    st.q = q0;
    st.s = s1;
    st.n = 0;
    return st;
}

void TrackerConfig::validate() const {
    if (!(mu >= 0.0)) {
        throw std::invalid_argument("TrackerConfig: mu must be >= 0");
    }
    if (!(nu > 0.0)) {
        throw std::invalid_argument("TrackerConfig: nu must be > 0");
    }
    if (!(grad_scale > 0.0)) {
        throw std::invalid_argument("TrackerConfig: grad_scale must be > 0");
    }
    if (!(sigma_n2 >= 0.0) || !(sigma_c2 >= 0.0)) {
        throw std::invalid_argument("TrackerConfig: variances must be >= 0");
    }
    if (a0 < 0.0 || a0 > 1.0) {
        throw std::invalid_argument("TrackerConfig: a0 must be in [0, 1]");
    }
    if (!(p1 >= 0.0)) {
        throw std::invalid_argument("TrackerConfig: p1 must be >= 0");
    }
}

cplx ls_estimate(std::span<const cplx> x, std::span<const cplx> y) {
    const Projection pr = project(x, y);
    if (pr.x_norm2 <= 0.0) {
        throw std::invalid_argument("ls_estimate: zero pilot");
    }
    return pr.xy / pr.x_norm2;
}

cplx mmse_estimate(std::span<const cplx> x, std::span<const cplx> y, double sigma_n2,
                   double sigma_c2) {
    if (!(sigma_n2 >= 0.0) || !(sigma_c2 >= 0.0)) {
        throw std::invalid_argument("mmse_estimate: variances must be >= 0");
    }
    // x^H (sigma_n2 I + (1+sigma_c2) x x^H)^-1 = x^H / (sigma_n2 + 1 + sigma_c2)
    // for unit-norm x (Sherman-Morrison); at sigma_n2 = sigma_c2 = 0 the
    // denominator is 1 and the estimate degenerates to LS.
    return unit_projection(x, y) / (1.0 + sigma_c2 + sigma_n2);
}

StepInfo kalman_step(FilterState& state, std::span<const cplx> x, std::span<const cplx> y,
                     double a_known, double sigma_n2, double sigma_c2) {
    if (!(a_known >= 0.0 && a_known <= 1.0)) {
        throw std::invalid_argument("kalman_step: AR coefficient must be in [0, 1]");
    }
    const cplx u = unit_projection(x, y);
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
        throw std::runtime_error("kalman_step: non-finite observation at slot " +
                                 std::to_string(state.n));
    }

    const double a = a_known;
    const cplx e = u - a * state.h_hat;                     // x^H e_n
    const double denom = sigma_n2 + state.p + sigma_c2;     // x^H R x for unit x
    const double kappa = denom > 0.0 ? state.p / denom : 0.0;  // k x

    state.h_hat = a * state.h_hat + kappa * e;
    state.p = a * a * (1.0 - kappa) * state.p + (1.0 - a * a);
    state.a = a;
    state.n += 1;
    check_finite(state);

    StepInfo info;
    info.estimate = state.h_hat;
    info.innovation = e;
    info.gain = kappa;
    return info;
}

namespace {

// Shared body of the tracker; `predict_output` selects the reported estimate.
StepInfo tracker_step(FilterState& state, std::span<const cplx> x, std::span<const cplx> y,
                      const TrackerConfig& cfg, bool predict_output) {
    const cplx u = unit_projection(x, y);
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
        throw std::runtime_error("modified_kalman_step: non-finite observation at slot " +
                                 std::to_string(state.n));
    }

    const double a_prev = state.a;
    const cplx h_prev = state.h_hat;
    const cplx q_prev = state.q;
    const double p_n = state.p;
    const double s_n = state.s;

    // Ordered recursion: innovation and gradient read slot-(n-1) values,
    // the a update happens before the gain and measurement update.
    const cplx e = u - a_prev * h_prev;
    const double denom = cfg.sigma_n2 + p_n + cfg.sigma_c2;
    const cplx grad = -std::conj(a_prev * q_prev + h_prev) * e;
    const double capped =
        std::clamp(cfg.grad_scale * grad.real(), -cfg.nu, cfg.nu);
    const double a = clamp01(a_prev - cfg.mu * capped);

    const double kappa = denom > 0.0 ? p_n / denom : 0.0;
    const double one_minus_kx = 1.0 - kappa;

    state.h_hat = a * h_prev + kappa * e;

    // Derivative chain w.r.t. a along the fixed-a trajectory:
    //   m   = d(kx)/da factor  = (1-kx) s_n / (x^H R x)
    //   q_n = (1-kx)(a q_{n-1} + h_{n-1}) + m e
    //   s_{n+1} = a^2 (1-kx)^2 s_n + 2a[(1-kx) p_n - 1]
    // The s recursion is the exact total derivative of the p recursion
    // below; the commonly quoted -2a*kx*p_n forcing term matches it only
    // at p_n = 1 and fails finite-difference checks elsewhere.
    const double m = denom > 0.0 ? one_minus_kx * s_n / denom : 0.0;
    state.q = one_minus_kx * (a * q_prev + h_prev) + m * e;
    state.p = a * a * one_minus_kx * p_n + (1.0 - a * a);
    state.s = a * a * one_minus_kx * one_minus_kx * s_n +
              2.0 * a * (one_minus_kx * p_n - 1.0);
    state.a = a;
    state.n += 1;
    check_finite(state);

    StepInfo info;
    info.estimate = predict_output ? a * h_prev : state.h_hat;
    info.innovation = e;
    info.gain = kappa;
    info.m_scalar = m;
    info.grad = grad;
    info.grad_applied = capped;
    return info;
}

}  // namespace

StepInfo modified_kalman_step(FilterState& state, std::span<const cplx> x,
                              std::span<const cplx> y, const TrackerConfig& cfg) {
    return tracker_step(state, x, y, cfg, /*predict_output=*/false);
}

StepInfo predictor_step(FilterState& state, std::span<const cplx> x,
                        std::span<const cplx> y, const TrackerConfig& cfg) {
    return tracker_step(state, x, y, cfg, /*predict_output=*/true);
}

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::kLs: return "ls";
        case EstimatorKind::kMmse: return "mmse";
        case EstimatorKind::kKalman: return "kalman";
        case EstimatorKind::kModifiedKalman: return "modkalman";
        case EstimatorKind::kPredictor: return "predictor";
        case EstimatorKind::kRunningAverage: return "avg";
    }
    throw std::logic_error("estimator_name: unknown kind");
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "ls") return EstimatorKind::kLs;
    if (name == "mmse") return EstimatorKind::kMmse;
    if (name == "kalman") return EstimatorKind::kKalman;
    if (name == "modkalman") return EstimatorKind::kModifiedKalman;
    if (name == "predictor") return EstimatorKind::kPredictor;
    if (name == "avg") return EstimatorKind::kRunningAverage;
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (expected ls,mmse,kalman,modkalman,predictor,avg)");
}

double SlotEstimator::tracked_a() const {
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

class LsEstimator final : public SlotEstimator {
  public:
    cplx update(std::span<const cplx> x, std::span<const cplx> y) override {
        return ls_estimate(x, y);
    }
    EstimatorKind kind() const override { return EstimatorKind::kLs; }
};

class MmseEstimator final : public SlotEstimator {
  public:
    MmseEstimator(double sigma_n2, double sigma_c2)
        : sigma_n2_(sigma_n2), sigma_c2_(sigma_c2) {}
    cplx update(std::span<const cplx> x, std::span<const cplx> y) override {
        return mmse_estimate(x, y, sigma_n2_, sigma_c2_);
    }
    EstimatorKind kind() const override { return EstimatorKind::kMmse; }

  private:
    double sigma_n2_, sigma_c2_;
};

class KalmanEstimator final : public SlotEstimator {
  public:
    KalmanEstimator(const TrackerConfig& cfg, double fixed_a)
        : state_(cfg.initial_state()), fixed_a_(fixed_a),
          sigma_n2_(cfg.sigma_n2), sigma_c2_(cfg.sigma_c2) {}
    cplx update(std::span<const cplx> x, std::span<const cplx> y) override {
        return kalman_step(state_, x, y, fixed_a_, sigma_n2_, sigma_c2_).estimate;
    }
    EstimatorKind kind() const override { return EstimatorKind::kKalman; }

  private:
    FilterState state_;
    double fixed_a_, sigma_n2_, sigma_c2_;
};

class TrackerEstimator final : public SlotEstimator {
  public:
    TrackerEstimator(const TrackerConfig& cfg, bool predictor)
        : cfg_(cfg), state_(cfg.initial_state()), predictor_(predictor) {}
    cplx update(std::span<const cplx> x, std::span<const cplx> y) override {
        return predictor_ ? predictor_step(state_, x, y, cfg_).estimate
                          : modified_kalman_step(state_, x, y, cfg_).estimate;
    }
    EstimatorKind kind() const override {
        return predictor_ ? EstimatorKind::kPredictor : EstimatorKind::kModifiedKalman;
    }
    double tracked_a() const override { return state_.a; }

  private:
    TrackerConfig cfg_;
    FilterState state_;
    bool predictor_;
};

class RunningAverageEstimator final : public SlotEstimator {
  public:
    cplx update(std::span<const cplx> x, std::span<const cplx> y) override {
        sum_ += ls_estimate(x, y);
        count_ += 1;
        return sum_ / static_cast<double>(count_);
    }
    EstimatorKind kind() const override { return EstimatorKind::kRunningAverage; }

  private:
    cplx sum_{0.0, 0.0};
    std::size_t count_ = 0;
};

}  // namespace

std::unique_ptr<SlotEstimator> make_estimator(EstimatorKind kind, const TrackerConfig& cfg,
                                              double kalman_fixed_a) {
    cfg.validate();
    switch (kind) {
        case EstimatorKind::kLs:
            return std::make_unique<LsEstimator>();
        case EstimatorKind::kMmse:
            return std::make_unique<MmseEstimator>(cfg.sigma_n2, cfg.sigma_c2);
        case EstimatorKind::kKalman:
            return std::make_unique<KalmanEstimator>(cfg, kalman_fixed_a);
        case EstimatorKind::kModifiedKalman:
            return std::make_unique<TrackerEstimator>(cfg, false);
        case EstimatorKind::kPredictor:
            return std::make_unique<TrackerEstimator>(cfg, true);
        case EstimatorKind::kRunningAverage:
            return std::make_unique<RunningAverageEstimator>();
    }
    throw std::logic_error("make_estimator: unknown kind");
}

GridSearchResult grid_optimal_a(double v_kmh, double sigma_n2, double sigma_c2,
                                std::span<const double> grid, std::size_t n_slots,
                                std::size_t n_realizations,
                                const GridSearchParams& params) {
    if (grid.empty()) {
        throw std::invalid_argument("grid_optimal_a: empty grid");
    }
    for (double a : grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("grid_optimal_a: grid values must be in [0, 1]");
        }
    }
    if (n_realizations == 0 || n_slots <= params.burn_in) {
        throw std::invalid_argument("grid_optimal_a: need n_realizations >= 1 and "
                                    "n_slots > burn_in");
    }

    const double f_d = doppler_shift(kmh_to_mps(v_kmh), params.f_c);
    GridSearchResult result;
    result.grid.assign(grid.begin(), grid.end());
    result.mse.assign(grid.size(), 0.0);

    // Matched-filter outputs u_n = h_n + c_n + w_n are a sufficient
    // statistic for every unit-norm pilot, so the grid runs consume scalar
    // streams through length-1 "pilots".
    const cplx one{1.0, 0.0};
    const std::span<const cplx> x(&one, 1);
    std::vector<cplx> u(n_slots);
    std::vector<cplx> h(n_slots);
    for (std::size_t r = 0; r < n_realizations; ++r) {
        Xoshiro256pp chan_rng(substream_seed(params.seed, {0x6721u, r}));
        Xoshiro256pp cont_rng(substream_seed(params.seed, {0x6722u, r}));
        Xoshiro256pp noise_rng(substream_seed(params.seed, {0x6723u, r}));
        const ClarkeChannel channel(chan_rng, params.n_scatterers, f_d);
        for (std::size_t n = 0; n < n_slots; ++n) {
            h[n] = channel.sample(static_cast<double>(n) * params.t_s);
            u[n] = h[n] + idealized_contaminator(cont_rng, sigma_c2) +
                   complex_gaussian(noise_rng, sigma_n2);
        }
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            FilterState st;
            st.p = params.p1;
            st.a = grid[gi];
            double acc = 0.0;
            for (std::size_t n = 0; n < n_slots; ++n) {
                const std::span<const cplx> yn(&u[n], 1);
                const cplx est = kalman_step(st, x, yn, grid[gi], sigma_n2, sigma_c2).estimate;
                if (n >= params.burn_in) {
                    acc += std::norm(est - h[n]);
                }
            }
            result.mse[gi] += acc / static_cast<double>(n_slots - params.burn_in);
        }
    }
    for (double& v : result.mse) {
        v /= static_cast<double>(n_realizations);
    }
    result.best_index = static_cast<std::size_t>(
        std::min_element(result.mse.begin(), result.mse.end()) - result.mse.begin());
    result.best_a = result.grid[result.best_index];
    return result;
}

}  // namespace pilotsim
