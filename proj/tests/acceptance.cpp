// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Each criterion is seeded and deterministic; run `acceptance` for all or
// `acceptance 3 7 9` for a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pilotsim/channel.hpp"
#include "pilotsim/cli.hpp"
#include "pilotsim/estimators.hpp"
#include "pilotsim/harness.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/scenario.hpp"

using namespace pilotsim;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 20180905;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome pass_if(bool ok, const std::string& detail) { return {ok, detail}; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- c1: empirical mean collision distance, K=96, 1e5 slots, +-2% --------
Outcome criterion1() {
    Xoshiro256pp rng(substream_seed(kAcceptanceSeed, {1}));
    const auto distances = simulate_collision_distances(rng, 96, 100000);
    const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) /
                        static_cast<double>(distances.size());
    const double expected = expected_collision_distance(96);
    const double rel = std::fabs(mean - expected) / expected;
    return pass_if(rel <= 0.02, "mean t_c = " + fmt(mean) + " over " +
                                    std::to_string(distances.size()) +
                                    " gaps, expected 96 +-2% (rel err " + fmt(rel) + ")");
}

// ---- c2: constant-channel averaging, error variance sigma_c2/n ------------
Outcome criterion2() {
    SimConfig cfg;
    cfg.master_seed = substream_seed(kAcceptanceSeed, {2});
    cfg.sigma_c2 = 0.6;
    cfg.sigma_n2 = 0.0;
    cfg.v_kmh = {0.0};
    cfg.n_slots = 50;
    cfg.burn_in = 0;
    cfg.estimators = {EstimatorKind::kRunningAverage};
    double var50 = 0.0;
    const int n_real = 1000;
    for (int r = 0; r < n_real; ++r) {
        var50 += run_realization(cfg, static_cast<std::size_t>(r)).sq_errors[0][49];
    }
    var50 /= n_real;
    const double rel = std::fabs(var50 - 0.012) / 0.012;
    return pass_if(rel <= 0.20, "error variance at slot 50 = " + fmt(var50) +
                                    ", expected 0.6/50 = 0.012 +-20% (rel err " +
                                    fmt(rel) + ")");
}

// ---- c3/c4: LS and MMSE analytic oracles over 1e4 slot-samples ------------
Outcome ls_mmse_criterion(EstimatorKind kind, double expected) {
    SimConfig cfg;
    cfg.master_seed = substream_seed(kAcceptanceSeed, {3});
    cfg.sigma_c2 = 0.6;
    cfg.n_slots = 10500;
    cfg.burn_in = 500;
    cfg.n_realizations = 1;
    cfg.v_kmh = {30.0};
    cfg.estimators = {kind};
    const auto res = run_realization(cfg, 0);
    const std::vector<std::vector<double>> errors = {res.sq_errors[0]};
    const auto stats = compute_mse(errors, cfg.burn_in);
    const double err = std::fabs(stats.mse - expected);
    return pass_if(err <= 0.02, estimator_name(kind) + " MSE = " + fmt(stats.mse) +
                                    " over 10^4 slot-samples, expected " + fmt(expected) +
                                    " +-0.02");
}

// ---- c5: derivative recursions vs central finite differences --------------
Outcome criterion5() {
    const double delta = 1e-6;
    double worst = 0.0;
    std::string worst_what = "none";
    Xoshiro256pp param_rng(substream_seed(kAcceptanceSeed, {5}));
    for (int traj = 0; traj < 20; ++traj) {
        const double a0 = uniform_range(param_rng, 0.05, 0.98);
        const double p1 = uniform_range(param_rng, 0.0, 1.0);
        const double sn2 = uniform_range(param_rng, 0.05, 0.5);
        const double sc2 = uniform_range(param_rng, 0.0, 1.0);
        const double f_d =
            doppler_shift(kmh_to_mps(uniform_range(param_rng, 1.0, 130.0)), 1.8e9);
        const std::size_t n_slots = 200;

        Xoshiro256pp chan(substream_seed(kAcceptanceSeed, {5, 10, static_cast<std::uint64_t>(traj)}));
        Xoshiro256pp cont(substream_seed(kAcceptanceSeed, {5, 11, static_cast<std::uint64_t>(traj)}));
        Xoshiro256pp noise(substream_seed(kAcceptanceSeed, {5, 12, static_cast<std::uint64_t>(traj)}));
        const ClarkeChannel channel(chan, 20, f_d);
        std::vector<cplx> u(n_slots);
        for (std::size_t n = 0; n < n_slots; ++n) {
            u[n] = channel.sample(static_cast<double>(n) * 5e-4) +
                   idealized_contaminator(cont, sc2) + complex_gaussian(noise, sn2);
        }

        TrackerConfig cfg;
        cfg.mu = 0.0;  // truncations disabled; a pinned for the FD comparison
        cfg.a0 = a0;
        cfg.p1 = p1;
        cfg.sigma_n2 = sn2;
        cfg.sigma_c2 = sc2;

        const cplx one{1.0, 0.0};
        std::vector<cplx> q_ana(n_slots);
        std::vector<double> m_ana(n_slots), s_ana(n_slots), g_ana(n_slots);
        FilterState st = cfg.initial_state();
        for (std::size_t n = 0; n < n_slots; ++n) {
            const auto info = modified_kalman_step(st, {&one, 1}, {&u[n], 1}, cfg);
            q_ana[n] = st.q;
            m_ana[n] = info.m_scalar;
            s_ana[n] = st.s;
            g_ana[n] = 2.0 * info.grad.real();
        }

        std::vector<cplx> h_hi(n_slots), h_lo(n_slots);
        std::vector<double> k_hi(n_slots), k_lo(n_slots), p_hi(n_slots), p_lo(n_slots),
            c_hi(n_slots), c_lo(n_slots);
        auto run_fixed = [&](double a, std::vector<cplx>& h, std::vector<double>& k,
                             std::vector<double>& p, std::vector<double>& c) {
            FilterState fs;
            fs.p = p1;
            for (std::size_t n = 0; n < n_slots; ++n) {
                const auto info = kalman_step(fs, {&one, 1}, {&u[n], 1}, a, sn2, sc2);
                h[n] = info.estimate;
                k[n] = info.gain;
                p[n] = fs.p;
                c[n] = std::norm(info.innovation);
            }
        };
        run_fixed(a0 + delta, h_hi, k_hi, p_hi, c_hi);
        run_fixed(a0 - delta, h_lo, k_lo, p_lo, c_lo);

        auto check = [&](const char* what, std::function<double(std::size_t)> ana,
                         std::function<double(std::size_t)> hi,
                         std::function<double(std::size_t)> lo) {
            double scale = 0.0;
            std::vector<double> fd(n_slots);
            for (std::size_t n = 0; n < n_slots; ++n) {
                fd[n] = (hi(n) - lo(n)) / (2.0 * delta);
                scale = std::max(scale, std::fabs(fd[n]));
            }
            for (std::size_t n = 0; n < n_slots; ++n) {
                const double denom = std::max(std::fabs(fd[n]), 1e-3 * scale + 1e-30);
                const double rel = std::fabs(ana(n) - fd[n]) / denom;
                if (rel > worst) {
                    worst = rel;
                    worst_what = what;
                }
            }
        };
        check("q.re", [&](std::size_t n) { return q_ana[n].real(); },
              [&](std::size_t n) { return h_hi[n].real(); },
              [&](std::size_t n) { return h_lo[n].real(); });
        check("q.im", [&](std::size_t n) { return q_ana[n].imag(); },
              [&](std::size_t n) { return h_hi[n].imag(); },
              [&](std::size_t n) { return h_lo[n].imag(); });
        check("m", [&](std::size_t n) { return m_ana[n]; },
              [&](std::size_t n) { return k_hi[n]; },
              [&](std::size_t n) { return k_lo[n]; });
        check("s", [&](std::size_t n) { return s_ana[n]; },
              [&](std::size_t n) { return p_hi[n]; },
              [&](std::size_t n) { return p_lo[n]; });
        check("grad", [&](std::size_t n) { return g_ana[n]; },
              [&](std::size_t n) { return c_hi[n]; },
              [&](std::size_t n) { return c_lo[n]; });
    }
    return pass_if(worst < 1e-4, "worst relative FD error " + fmt(worst) + " (" +
                                     worst_what + ") over 20 trajectories x 200 slots, "
                                     "required < 1e-4");
}

// ---- c6: rank-one algebra vs naive tau x tau solves ------------------------
Outcome criterion6() {
    Xoshiro256pp rng(substream_seed(kAcceptanceSeed, {6}));
    double worst = 0.0;
    for (const std::size_t tau : {std::size_t{4}, std::size_t{96}}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto x = pilotsim::testing::random_unit_pilot(rng, tau);
            const double p = uniform_range(rng, 0.0, 1.0);
            const double sn2 = uniform_range(rng, 0.01, 1.0);
            const double sc2 = uniform_range(rng, 0.0, 1.0);
            const double kappa = p / (sn2 + p + sc2);
            const auto k_naive = pilotsim::testing::naive_kalman_gain(x, p, sn2, sc2);
            for (std::size_t j = 0; j < tau; ++j) {
                worst = std::max(worst, std::abs(k_naive[j] - kappa * std::conj(x[j])));
            }
            std::vector<cplx> y(tau);
            for (auto& v : y) {
                v = complex_gaussian(rng, 1.5);
            }
            worst = std::max(worst, std::abs(mmse_estimate(x, y, sn2, sc2) -
                                             pilotsim::testing::naive_mmse(x, y, sn2, sc2)));
        }
    }
    return pass_if(worst < 1e-10, "worst |fast - naive| = " + fmt(worst) +
                                      " over 100 cases, tau in {4,96}, required < 1e-10");
}

// ---- c7: Clarke power and autocorrelation ---------------------------------
Outcome criterion7() {
    std::string detail;
    bool ok = true;
    const double t_s = 5e-4;
    for (const double v_kmh : {3.0, 30.0, 100.0}) {
        const double f_d = doppler_shift(kmh_to_mps(v_kmh), 1.8e9);
        const std::size_t n_channels = 10000;
        const int max_lag = 20;
        std::vector<cplx> corr(max_lag + 1, cplx{0.0, 0.0});
        double power = 0.0;
        for (std::size_t i = 0; i < n_channels; ++i) {
            Xoshiro256pp rng(substream_seed(kAcceptanceSeed,
                                            {7, static_cast<std::uint64_t>(v_kmh), i}));
            const ClarkeChannel ch(rng, 20, f_d);
            const cplx h0 = ch.sample(0.0);
            power += std::norm(h0);
            for (int k = 1; k <= max_lag; ++k) {
                corr[k] += std::conj(h0) * ch.sample(k * t_s);
            }
        }
        const double mean_power = power / static_cast<double>(n_channels);
        double worst_rho = 0.0;
        for (int k = 1; k <= max_lag; ++k) {
            const double rho = corr[k].real() / power;
            worst_rho =
                std::max(worst_rho, std::fabs(rho - theoretical_autocorrelation(f_d, k * t_s)));
        }
        ok = ok && std::fabs(mean_power - 1.0) <= 0.02 && worst_rho <= 0.02;
        detail += "v=" + fmt(v_kmh) + ": E|h|^2=" + fmt(mean_power) +
                  ", worst |rho - J0|=" + fmt(worst_rho) + "; ";
    }
    return pass_if(ok, detail + "required: power 1+-0.02, autocorr +-0.02 for lags 1..20");
}

// ---- c8: order-of-magnitude decontamination at low mobility ----------------
Outcome criterion8() {
    std::string detail;
    bool ok = true;
    for (const double v : {1.0, 3.0}) {
        SimConfig cfg;
        cfg.master_seed = substream_seed(kAcceptanceSeed, {8});
        cfg.v_kmh = {v};
        cfg.sigma_c2 = 0.6;
        cfg.estimators = {EstimatorKind::kLs, EstimatorKind::kModifiedKalman};
        const SweepResult res = run_sweep(cfg, SweepAxis::kMobility, nullptr);
        const double ls = res.rows[0].mse;
        const double mod = res.rows[1].mse;
        ok = ok && mod <= 0.15 * ls;
        detail += "v=" + fmt(v) + ": modkalman " + fmt(mod) + " vs LS " + fmt(ls) +
                  " (ratio " + fmt(mod / ls) + "); ";
    }
    return pass_if(ok, detail + "required ratio <= 0.15");
}

// ---- c9: tracker convergence vs the grid oracle ----------------------------
Outcome criterion9() {
    std::string detail;
    bool ok = true;
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i) {
        grid[i] = 0.01 * i;
    }
    for (const double v : {3.0, 30.0, 100.0}) {
        SimConfig cfg;
        cfg.master_seed = substream_seed(kAcceptanceSeed, {9, static_cast<std::uint64_t>(v)});
        cfg.v_kmh = {v};
        cfg.n_slots = 5000;
        cfg.burn_in = 500;
        cfg.n_realizations = 30;
        cfg.estimators = {EstimatorKind::kModifiedKalman};
        double tracked = 0.0;
        for (std::size_t r = 0; r < cfg.n_realizations; ++r) {
            tracked += run_realization(cfg, r).final_a[0];
        }
        tracked /= static_cast<double>(cfg.n_realizations);

        // The MSE basin is very flat at high mobility; average the oracle
        // over enough realizations that the argmin settles.
        GridSearchParams params;
        params.seed = substream_seed(kAcceptanceSeed, {9, 77, static_cast<std::uint64_t>(v)});
        const GridSearchResult oracle =
            grid_optimal_a(v, 0.2, 0.6, grid, 5000, 24, params);
        const double gap = std::fabs(tracked - oracle.best_a);
        ok = ok && gap <= 0.05;
        detail += "v=" + fmt(v) + ": tracked a=" + fmt(tracked) + ", grid a*=" +
                  fmt(oracle.best_a) + " (gap " + fmt(gap) + "); ";
    }
    return pass_if(ok, detail + "required gap <= 0.05");
}

// ---- c10: high-mobility parity with MMSE -----------------------------------
Outcome criterion10() {
    SimConfig cfg;
    cfg.master_seed = substream_seed(kAcceptanceSeed, {10});
    cfg.v_kmh = {130.0};
    cfg.sigma_c2 = 0.6;
    cfg.estimators = {EstimatorKind::kMmse, EstimatorKind::kModifiedKalman};
    const SweepResult res = run_sweep(cfg, SweepAxis::kMobility, nullptr);
    const double mmse = res.rows[0].mse;
    const double mod = res.rows[1].mse;
    return pass_if(mod <= 1.1 * mmse, "v=130: modkalman " + fmt(mod) + " vs MMSE " +
                                          fmt(mmse) + " (ratio " + fmt(mod / mmse) +
                                          "), required <= 1.1");
}

// ---- c11: no-hopping control ------------------------------------------------
Outcome criterion11() {
    SimConfig cfg;
    cfg.master_seed = substream_seed(kAcceptanceSeed, {11});
    cfg.mode = ContaminationMode::kExplicit;
    cfg.hopping = false;
    cfg.v_kmh = {0.0};  // static user and static contaminators
    cfg.sigma_c2 = 0.6;
    cfg.n_slots = 4000;
    cfg.burn_in = 500;
    cfg.n_realizations = 50;
    cfg.estimators = {EstimatorKind::kModifiedKalman};
    const SweepResult res = run_sweep(cfg, SweepAxis::kMobility, nullptr);
    const double mse = res.rows[0].mse;
    return pass_if(mse >= 0.8 * 0.6, "static no-hopping modkalman MSE = " + fmt(mse) +
                                         ", required >= 0.8*sigma_c2 = 0.48 "
                                         "(contamination not suppressed)");
}

// ---- c12: determinism --------------------------------------------------------
Outcome criterion12() {
    SimConfig cfg;
    cfg.master_seed = substream_seed(kAcceptanceSeed, {12});
    cfg.v_kmh = {3.0, 130.0};
    cfg.n_slots = 2000;
    cfg.n_realizations = 10;
    const SweepResult r1 = run_sweep(cfg, SweepAxis::kMobility, nullptr);
    const SweepResult r2 = run_sweep(cfg, SweepAxis::kMobility, nullptr);
    SimConfig serial = cfg;
    serial.workers = 1;
    const SweepResult r3 = run_sweep(serial, SweepAxis::kMobility, nullptr);
    const bool identical = csv_to_string(r1) == csv_to_string(r2) &&
                           csv_to_string(r1) == csv_to_string(r3);
    return pass_if(identical,
                   identical ? "equal seeds give byte-identical CSV (parallel == serial)"
                             : "CSV outputs differ between runs");
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "collision distance mean", criterion1},
        {2, "constant-channel averaging variance", criterion2},
        {3, "LS analytic oracle",
         [] { return ls_mmse_criterion(EstimatorKind::kLs, 0.8); }},
        {4, "MMSE analytic oracle",
         [] { return ls_mmse_criterion(EstimatorKind::kMmse, 0.4444444444444444); }},
        {5, "derivative recursions vs finite differences", criterion5},
        {6, "rank-one algebra vs naive solves", criterion6},
        {7, "Clarke power and autocorrelation", criterion7},
        {8, "order-of-magnitude decontamination", criterion8},
        {9, "tracker convergence vs grid oracle", criterion9},
        {10, "high-mobility MMSE parity", criterion10},
        {11, "no-hopping control", criterion11},
        {12, "determinism", criterion12},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }

    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& err) {
            outcome = {false, std::string("exception: ") + err.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s — %s (%.2f s)\n",
                    outcome.pass ? "PASS" : "FAIL", c.id, c.title,
                    outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) {
            ++failures;
        }
    }
    if (ran == 0) {
        std::printf("no matching criteria\n");
        return 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
