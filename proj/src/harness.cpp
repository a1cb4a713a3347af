// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pilotsim/channel.hpp"
#include "pilotsim/pilots.hpp"

namespace pilotsim {

namespace {

// Substream tags for the streams owned by the cell of interest. The hop tag
// must match scenario.cpp's so that cell ids share one namespace; the cell
// of interest is cell 0 there.
constexpr std::uint64_t kTagChannel = 0x4348u;
constexpr std::uint64_t kTagNoise = 0x4E4Fu;
constexpr std::uint64_t kTagContam = 0x434Fu;
constexpr std::uint64_t kTagHop = 0x484Fu;

}  // namespace

void SimConfig::validate() const {
    if (sigma_c2 && sir_db) {
        throw std::invalid_argument("config: sigma_c2 and sir_db are mutually exclusive");
    }
    if (sigma_c2 && !(*sigma_c2 >= 0.0)) {
        throw std::invalid_argument("config: sigma_c2 must be >= 0");
    }
    if (!(sigma_n2 >= 0.0)) {
        throw std::invalid_argument("config: sigma_n2 must be >= 0");
    }
    if (n_cells < 1) {
        throw std::invalid_argument("config: L must be >= 1");
    }
    if (users_per_cell < 1 || tau < 1) {
        throw std::invalid_argument("config: K and tau must be >= 1");
    }
    if (users_per_cell > tau) {
        throw std::invalid_argument("config: K must not exceed tau");
    }
    if (!(mu >= 0.0)) {
        throw std::invalid_argument("config: mu must be >= 0");
    }
    if (!(nu > 0.0)) {
        throw std::invalid_argument("config: nu must be > 0");
    }
    if (!(f_c > 0.0)) {
        throw std::invalid_argument("config: f_c must be > 0");
    }
    if (n_scatterers < 1) {
        throw std::invalid_argument("config: N_s must be >= 1");
    }
    if (!(t_s > 0.0)) {
        throw std::invalid_argument("config: t_s must be > 0");
    }
    if (a0 < 0.0 || a0 > 1.0) {
        throw std::invalid_argument("config: a0 must be in [0, 1]");
    }
    if (!(p1 >= 0.0)) {
        throw std::invalid_argument("config: p1 must be >= 0");
    }
    if (v_kmh.empty()) {
        throw std::invalid_argument("config: v_kmh must not be empty");
    }
    for (double v : v_kmh) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("config: v_kmh entries must be >= 0");
        }
    }
    if (n_slots <= burn_in) {
        throw std::invalid_argument("config: n_slots must exceed burn_in");
    }
    if (n_realizations < 1) {
        throw std::invalid_argument("config: n_realizations must be >= 1");
    }
    if (estimators.empty()) {
        throw std::invalid_argument("config: estimator set must not be empty");
    }
    if (mode == ContaminationMode::kExplicit && n_cells < 2 &&
        contamination_power() > 0.0) {
        throw std::invalid_argument(
            "config: explicit mode needs L >= 2 for nonzero contamination");
    }
}

double SimConfig::contamination_power() const {
    if (sigma_c2 && sir_db) {
        throw std::invalid_argument("config: sigma_c2 and sir_db are mutually exclusive");
    }
    if (sir_db) {
        return sir_to_sigma_c(*sir_db);
    }
    return sigma_c2.value_or(0.6);
}

double SimConfig::resolved_sir_db() const { return sigma_c_to_sir_db(contamination_power()); }

TrackerConfig SimConfig::tracker_config() const {
    TrackerConfig tc;
    tc.mu = mu;
    tc.nu = nu;
    tc.sigma_n2 = sigma_n2;
    tc.sigma_c2 = contamination_power();
    tc.grad_scale = static_cast<double>(tau);
    tc.a0 = a0;
    tc.h_hat0 = h_hat0;
    tc.q0 = q0;
    tc.p1 = p1;
    tc.s1 = s1;
    return tc;
}

CellTopology SimConfig::topology() const {
    CellTopology topo;
    topo.n_cells = n_cells;
    topo.users_per_cell = users_per_cell;
    topo.mode = mode;
    topo.sigma_c2 = contamination_power();
    topo.sigma_n2 = sigma_n2;
    return topo;
}

RealizationResult run_realization(const SimConfig& cfg, std::size_t realization_index) {
    cfg.validate();
    const std::uint64_t r = realization_index;
    const double sigma_c2 = cfg.contamination_power();
    const double f_d = doppler_shift(kmh_to_mps(cfg.v_kmh.front()), cfg.f_c);

    const PilotBook book(cfg.tau, cfg.users_per_cell);
    Xoshiro256pp chan_rng(substream_seed(cfg.master_seed, {kTagChannel, r}));
    Xoshiro256pp noise_rng(substream_seed(cfg.master_seed, {kTagNoise, r}));
    Xoshiro256pp contam_rng(substream_seed(cfg.master_seed, {kTagContam, r}));
    const ClarkeChannel channel(chan_rng, cfg.n_scatterers, f_d);

    const CellTopology topo = cfg.topology();
    std::optional<NeighborField> neighbors;
    if (cfg.mode == ContaminationMode::kExplicit) {
        neighbors.emplace(topo, cfg.master_seed, r, cfg.n_scatterers, f_d, cfg.hopping,
                          cfg.t_s);
    }

    const TrackerConfig tracker = cfg.tracker_config();
    const double fixed_a = cfg.kalman_a >= 0.0 ? cfg.kalman_a : cfg.a0;
    std::vector<std::unique_ptr<SlotEstimator>> ests;
    ests.reserve(cfg.estimators.size());
    for (EstimatorKind kind : cfg.estimators) {
        ests.push_back(make_estimator(kind, tracker, fixed_a));
    }

    RealizationResult result;
    result.sq_errors.assign(ests.size(), {});
    for (auto& seq : result.sq_errors) {
        seq.reserve(cfg.n_slots);
    }
    result.diverged.assign(ests.size(), 0);
    result.final_a.assign(ests.size(), std::numeric_limits<double>::quiet_NaN());

    std::vector<cplx> contams;
    for (std::size_t n = 0; n < cfg.n_slots; ++n) {
        const double t = static_cast<double>(n) * cfg.t_s;
        const cplx h = channel.sample(t);

        std::size_t pilot_index = 0;  // user of interest is user 0 of cell 0
        if (cfg.hopping) {
            Xoshiro256pp hop_rng(substream_seed(cfg.master_seed, {kTagHop, r, 0, n}));
            pilot_index = hop(hop_rng, cfg.users_per_cell, n).pilot_of(0);
        }
        const std::span<const cplx> x = book.column(pilot_index);

        contams.clear();
        if (cfg.mode == ContaminationMode::kIdealized) {
            contams.push_back(idealized_contaminator(contam_rng, sigma_c2));
        } else if (neighbors) {
            contams = neighbors->contaminators_at(n, pilot_index);
        }

        const SlotObservation obs =
            build_slot_observation(h, contams, x, cfg.sigma_n2, noise_rng, n);

        for (std::size_t i = 0; i < ests.size(); ++i) {
            if (result.diverged[i]) {
                continue;
            }
            cplx est;
            try {
                est = ests[i]->update(x, obs.y);
            } catch (const std::runtime_error&) {
                result.diverged[i] = 1;
                continue;
            }
            if (!std::isfinite(est.real()) || !std::isfinite(est.imag()) ||
                std::abs(est) > cfg.divergence_limit) {
                result.diverged[i] = 1;
                continue;
            }
            result.sq_errors[i].push_back(std::norm(est - obs.h_true));
        }
    }
    for (std::size_t i = 0; i < ests.size(); ++i) {
        result.final_a[i] = ests[i]->tracked_a();
    }
    return result;
}

MseStats compute_mse(std::span<const std::vector<double>> per_realization_errors,
                     std::size_t burn_in) {
    if (per_realization_errors.empty()) {
        throw std::invalid_argument("compute_mse: no realizations");
    }
    std::vector<double> means;
    means.reserve(per_realization_errors.size());
    std::size_t n_samples = 0;
    for (const auto& errors : per_realization_errors) {
        if (errors.size() <= burn_in) {
            throw std::invalid_argument("compute_mse: empty post-burn-in window");
        }
        double acc = 0.0;
        for (std::size_t n = burn_in; n < errors.size(); ++n) {
            acc += errors[n];
        }
        means.push_back(acc / static_cast<double>(errors.size() - burn_in));
        n_samples += errors.size() - burn_in;
    }
    double mse = 0.0;
    for (double m : means) {
        mse += m;
    }
    mse /= static_cast<double>(means.size());

    double std_err = 0.0;
    if (means.size() > 1) {
        double var = 0.0;
        for (double m : means) {
            var += (m - mse) * (m - mse);
        }
        var /= static_cast<double>(means.size() - 1);
        std_err = std::sqrt(var / static_cast<double>(means.size()));
    }
    return {mse, std_err, n_samples};
}

namespace {

struct PointAggregate {
    // Per estimator: per-realization post-burn-in means (NaN where diverged).
    std::vector<std::vector<double>> means;
    std::size_t diverged = 0;
};

// Runs all realizations of one experiment point, realization index space
// partitioned across workers; slot r of every output vector is written by
// exactly one worker, so the reduction order is fixed.
PointAggregate run_point(const SimConfig& cfg) {
    const std::size_t n_est = cfg.estimators.size();
    const std::size_t n_real = cfg.n_realizations;
    PointAggregate agg;
    agg.means.assign(n_est, std::vector<double>(n_real, 0.0));
    std::vector<std::uint8_t> diverged(n_real * n_est, 0);

    std::size_t n_workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
    if (n_workers == 0) {
        n_workers = 1;
    }
    n_workers = std::min(n_workers, n_real);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        try {
            for (std::size_t r = next.fetch_add(1); r < n_real; r = next.fetch_add(1)) {
                const RealizationResult res = run_realization(cfg, r);
                for (std::size_t i = 0; i < n_est; ++i) {
                    if (res.diverged[i] || res.sq_errors[i].size() <= cfg.burn_in) {
                        diverged[r * n_est + i] = 1;
                        agg.means[i][r] = std::numeric_limits<double>::quiet_NaN();
                        continue;
                    }
                    double acc = 0.0;
                    for (std::size_t n = cfg.burn_in; n < res.sq_errors[i].size(); ++n) {
                        acc += res.sq_errors[i][n];
                    }
                    agg.means[i][r] =
                        acc / static_cast<double>(res.sq_errors[i].size() - cfg.burn_in);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(n_real);  // stop the other workers
        }
    };

    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            threads.emplace_back(worker);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    for (std::uint8_t d : diverged) {
        agg.diverged += d;
    }
    return agg;
}

SweepRow make_row(const SimConfig& cfg, EstimatorKind kind, double v, double sir_db,
                  std::span<const double> realization_means, std::size_t n_slots_kept) {
    std::vector<double> valid;
    valid.reserve(realization_means.size());
    for (double m : realization_means) {
        if (std::isfinite(m)) {
            valid.push_back(m);
        }
    }
    SweepRow row;
    row.estimator = estimator_name(kind);
    row.v_kmh = v;
    row.sir_db = sir_db;
    row.seed = cfg.master_seed;
    if (valid.empty()) {
        row.mse = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    double mse = 0.0;
    for (double m : valid) {
        mse += m;
    }
    mse /= static_cast<double>(valid.size());
    double var = 0.0;
    for (double m : valid) {
        var += (m - mse) * (m - mse);
    }
    row.mse = mse;
    row.std_err = valid.size() > 1
                      ? std::sqrt(var / static_cast<double>(valid.size() - 1) /
                                  static_cast<double>(valid.size()))
                      : 0.0;
    row.n_samples = valid.size() * n_slots_kept;
    return row;
}

}  // namespace

SweepResult run_sweep(const SimConfig& cfg, SweepAxis axis, std::ostream* progress) {
    cfg.validate();
    const std::vector<double>& points =
        axis == SweepAxis::kMobility ? cfg.v_kmh : cfg.sir_grid_db;
    if (points.empty()) {
        throw std::invalid_argument("run_sweep: empty axis");
    }

    const std::size_t n_slots_kept = cfg.n_slots - cfg.burn_in;
    SweepResult result;
    // Matrix of aggregates: [estimator][axis point].
    std::vector<std::vector<SweepRow>> rows(cfg.estimators.size());

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        SimConfig point_cfg = cfg;
        double v = 0.0;
        double sir_db = 0.0;
        if (axis == SweepAxis::kMobility) {
            v = points[pi];
            point_cfg.v_kmh = {v};
            sir_db = cfg.resolved_sir_db();
        } else {
            v = cfg.v_kmh.front();
            point_cfg.v_kmh = {v};
            sir_db = points[pi];
            point_cfg.sigma_c2.reset();
            point_cfg.sir_db = sir_db;
        }

        const auto start = std::chrono::steady_clock::now();
        const PointAggregate agg = run_point(point_cfg);
        result.diverged_realizations += agg.diverged;
        for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
            rows[i].push_back(make_row(point_cfg, cfg.estimators[i], v, sir_db,
                                       agg.means[i], n_slots_kept));
        }
        if (progress) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            (*progress) << "[sweep] "
                        << (axis == SweepAxis::kMobility ? "v_kmh=" : "sir_db=")
                        << points[pi] << " done: " << cfg.n_realizations
                        << " realizations x " << cfg.n_slots << " slots in " << secs
                        << " s\n";
        }
    }
    for (auto& per_estimator : rows) {
        for (auto& row : per_estimator) {
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

SurfaceResult run_surface(const SimConfig& cfg, std::span<const double> a_grid,
                          std::ostream* progress) {
    cfg.validate();
    if (a_grid.empty()) {
        throw std::invalid_argument("run_surface: empty a grid");
    }
    SurfaceResult surface;
    surface.a_grid.assign(a_grid.begin(), a_grid.end());
    surface.v_kmh = cfg.v_kmh;
    surface.mse.reserve(a_grid.size() * cfg.v_kmh.size());
    GridSearchParams params;
    params.f_c = cfg.f_c;
    params.t_s = cfg.t_s;
    params.n_scatterers = cfg.n_scatterers;
    params.burn_in = cfg.burn_in;
    for (std::size_t vi = 0; vi < cfg.v_kmh.size(); ++vi) {
        const auto start = std::chrono::steady_clock::now();
        params.seed = substream_seed(cfg.master_seed, {0x5346u, vi});
        const GridSearchResult res =
            grid_optimal_a(cfg.v_kmh[vi], cfg.sigma_n2, cfg.contamination_power(), a_grid,
                           cfg.n_slots, cfg.n_realizations, params);
        surface.mse.insert(surface.mse.end(), res.mse.begin(), res.mse.end());
        if (progress) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            (*progress) << "[surface] v_kmh=" << cfg.v_kmh[vi] << " done in " << secs
                        << " s\n";
        }
    }
    return surface;
}

}  // namespace pilotsim
