// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilotsim/channel.hpp"
#include "pilotsim/cli.hpp"
#include "pilotsim/harness.hpp"
#include "pilotsim/pilots.hpp"

namespace {

using namespace pilotsim;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> estimators;
    std::optional<std::string> mode;
    std::optional<double> sigma_c2;
    std::optional<double> sir_db;
    std::optional<std::size_t> n_slots;
    std::optional<std::size_t> n_realizations;
    std::optional<std::size_t> burn_in;
    bool no_hopping = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--config", c.config_path, "flat key=value config file or run manifest");
    sub->add_option("--seed", c.seed, "master seed (fallback: env PILOTSIM_SEED)");
    sub->add_option("--workers", c.workers, "worker threads (0 = machine parallelism)");
    sub->add_option("--estimators", c.estimators,
                    "comma list of ls,mmse,kalman,modkalman,predictor,avg");
    sub->add_option("--mode", c.mode, "contamination mode: idealized or explicit")
        ->check(CLI::IsMember({"idealized", "explicit"}));
    auto* sc = sub->add_option("--sigma-c2", c.sigma_c2, "total contamination power");
    auto* sir = sub->add_option("--sir-db", c.sir_db, "signal-to-interference ratio [dB]");
    sc->excludes(sir);
    sir->excludes(sc);
    sub->add_option("--n-slots", c.n_slots, "slots per realization");
    sub->add_option("--n-realizations", c.n_realizations, "Monte Carlo realizations");
    sub->add_option("--burn-in", c.burn_in, "slots excluded from MSE aggregation");
    sub->add_flag("--no-hopping", c.no_hopping, "disable pilot sequence hopping");
}

SimConfig build_config(const CommonOpts& c) {
    SimConfig cfg;
    // Seed precedence: --seed, then the config file, then PILOTSIM_SEED,
    // then the built-in default.
    if (const char* env = std::getenv("PILOTSIM_SEED")) {
        apply_config_entry(cfg, "master_seed", env);
    }
    if (!c.config_path.empty()) {
        cfg = parse_config(c.config_path);
    }
    if (c.seed) {
        cfg.master_seed = *c.seed;
    }
    if (c.workers) {
        cfg.workers = *c.workers;
    }
    if (c.estimators) {
        apply_config_entry(cfg, "estimators", *c.estimators);
    }
    if (c.mode) {
        apply_config_entry(cfg, "mode", *c.mode);
    }
    if (c.sigma_c2) {
        cfg.sigma_c2 = *c.sigma_c2;
        cfg.sir_db.reset();
    }
    if (c.sir_db) {
        cfg.sir_db = *c.sir_db;
        cfg.sigma_c2.reset();
    }
    if (c.n_slots) {
        cfg.n_slots = *c.n_slots;
    }
    if (c.n_realizations) {
        cfg.n_realizations = *c.n_realizations;
    }
    if (c.burn_in) {
        cfg.burn_in = *c.burn_in;
    }
    if (c.no_hopping) {
        cfg.hopping = false;
    }
    return cfg;
}

int emit_sweep(const SimConfig& cfg, SweepAxis axis, const std::string& out,
               const std::string& plot) {
    const SweepResult result = run_sweep(cfg, axis, &std::cerr);
    const std::filesystem::path csv_path(out);
    write_csv(result, csv_path);
    std::vector<std::filesystem::path> outputs = {csv_path};
    if (!plot.empty()) {
        render_plot(result, axis, plot);
        outputs.emplace_back(plot);
    }
    write_manifest(cfg, outputs, csv_path.string() + ".manifest.json");
    std::cout << "wrote " << csv_path.string() << " (" << result.rows.size() << " rows)\n";
    if (result.diverged_realizations > 0) {
        std::cerr << "warning: " << result.diverged_realizations
                  << " diverged realization(s) excluded from aggregates\n";
        return 2;
    }
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        if (!ok) {
            ++failures;
        }
    };

    check(std::fabs(doppler_shift(8.3333, 1.8e9) - 50.03441414) < 1e-6,
          "doppler shift at 30 km/h");
    check(std::fabs(theoretical_autocorrelation(50.0, 5e-4) - 0.99384100333854086) < 1e-9,
          "Clarke autocorrelation oracle J0(pi/20)");

    {
        const PilotBook book(16, 16);
        double max_err = 0.0;
        for (std::size_t i = 0; i < book.size(); ++i) {
            for (std::size_t j = 0; j < book.size(); ++j) {
                cplx g{0.0, 0.0};
                for (std::size_t t = 0; t < book.tau(); ++t) {
                    g += std::conj(book.column(i)[t]) * book.column(j)[t];
                }
                max_err = std::max(max_err, std::abs(g - (i == j ? cplx{1.0, 0.0}
                                                                 : cplx{0.0, 0.0})));
            }
        }
        check(max_err < 1e-12, "pilot book orthonormality");
    }

    {
        Xoshiro256pp rng(42);
        const auto d = simulate_collision_distances(rng, 8, 200000);
        double mean = 0.0;
        for (auto v : d) {
            mean += static_cast<double>(v);
        }
        mean /= static_cast<double>(d.size());
        check(std::fabs(mean - 8.0) < 0.4, "collision distance mean (K=8)");
    }

    {
        // LS and MMSE analytic MSEs at sigma_c2=0.6, sigma_n2=0.2.
        Xoshiro256pp rng(7);
        const cplx one{1.0, 0.0};
        const std::span<const cplx> x(&one, 1);
        double ls_acc = 0.0, mmse_acc = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const cplx h = complex_gaussian(rng, 1.0);
            const cplx u = h + complex_gaussian(rng, 0.6) + complex_gaussian(rng, 0.2);
            const std::span<const cplx> y(&u, 1);
            ls_acc += std::norm(ls_estimate(x, y) - h);
            mmse_acc += std::norm(mmse_estimate(x, y, 0.2, 0.6) - h);
        }
        check(std::fabs(ls_acc / n - 0.8) < 0.02, "LS analytic MSE 0.8");
        check(std::fabs(mmse_acc / n - 0.8 / 1.8) < 0.02, "MMSE analytic MSE 0.444");
    }

    {
        SimConfig cfg;
        cfg.n_slots = 600;
        cfg.n_realizations = 2;
        cfg.v_kmh = {30.0};
        const auto a = run_realization(cfg, 0);
        const auto b = run_realization(cfg, 0);
        check(a.sq_errors == b.sq_errors, "realization determinism");
    }

    std::cout << (failures == 0 ? "selftest OK\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pilot-hopping channel estimation simulator"};
    app.require_subcommand(1);

    CommonOpts mob_opts, sir_opts, surf_opts;
    std::string mob_out = "sweep_mobility.csv", mob_plot;
    std::string mob_v;
    auto* mob = app.add_subcommand("sweep-mobility", "MSE vs mobility at fixed SIR");
    add_common(mob, mob_opts);
    mob->add_option("--v-kmh", mob_v, "comma list of mobilities [km/h]");
    mob->add_option("--out", mob_out, "output CSV path");
    mob->add_option("--plot", mob_plot, "optional SVG path");

    std::string sir_out = "sweep_sir.csv", sir_plot, sir_list;
    std::optional<double> sir_v;
    auto* sir = app.add_subcommand("sweep-sir", "MSE vs SIR at fixed mobility");
    add_common(sir, sir_opts);
    sir->add_option("--sir-db-list", sir_list, "comma list of SIR values [dB]");
    sir->add_option("--v-kmh", sir_v, "mobility [km/h] (default 3)");
    sir->add_option("--out", sir_out, "output CSV path");
    sir->add_option("--plot", sir_plot, "optional SVG path");

    std::string surf_out = "surface_a.csv", surf_plot, surf_v;
    double a_min = 0.0, a_max = 1.0, a_step = 0.01;
    auto* surf = app.add_subcommand("surface-a", "fixed-a Kalman MSE over (a, v)");
    add_common(surf, surf_opts);
    surf->add_option("--a-min", a_min, "grid start");
    surf->add_option("--a-max", a_max, "grid end");
    surf->add_option("--a-step", a_step, "grid step");
    surf->add_option("--v-kmh", surf_v, "comma list of mobilities [km/h]");
    surf->add_option("--out", surf_out, "output CSV path");
    surf->add_option("--plot", surf_plot, "optional SVG heatmap path");

    std::size_t coll_k = 96;
    std::size_t coll_slots = 100000;
    std::optional<std::uint64_t> coll_seed;
    std::string coll_out;
    auto* coll = app.add_subcommand("collision-stats",
                                    "empirical collision-distance statistics");
    coll->add_option("--pilots", coll_k, "pilots per cell (K)");
    coll->add_option("--n-slots", coll_slots, "slots to simulate");
    coll->add_option("--seed", coll_seed, "master seed");
    coll->add_option("--out", coll_out, "optional CSV of the distance histogram");

    auto* self = app.add_subcommand("selftest", "run the built-in analytic oracle checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mob->parsed()) {
            SimConfig cfg = build_config(mob_opts);
            if (!mob_v.empty()) {
                apply_config_entry(cfg, "v_kmh", mob_v);
            }
            return emit_sweep(cfg, SweepAxis::kMobility, mob_out, mob_plot);
        }
        if (sir->parsed()) {
            SimConfig cfg = build_config(sir_opts);
            if (!sir_list.empty()) {
                apply_config_entry(cfg, "sir_grid_db", sir_list);
            }
            // Fixed mobility for the SIR axis: flag, else a single configured
            // v, else the 3 km/h pedestrian default.
            const double v_fixed =
                sir_v.value_or(cfg.v_kmh.size() == 1 ? cfg.v_kmh.front() : 3.0);
            cfg.v_kmh = {v_fixed};
            return emit_sweep(cfg, SweepAxis::kSir, sir_out, sir_plot);
        }
        if (surf->parsed()) {
            SimConfig cfg = build_config(surf_opts);
            if (!surf_v.empty()) {
                apply_config_entry(cfg, "v_kmh", surf_v);
            }
            if (!(a_step > 0.0) || a_max < a_min) {
                throw std::invalid_argument("surface-a: invalid a grid");
            }
            std::vector<double> grid;
            for (double a = a_min; a <= a_max + 1e-12; a += a_step) {
                grid.push_back(std::min(a, 1.0));
            }
            const SurfaceResult surface = run_surface(cfg, grid, &std::cerr);
            const std::filesystem::path csv_path(surf_out);
            write_surface_csv(surface, csv_path);
            std::vector<std::filesystem::path> outputs = {csv_path};
            if (!surf_plot.empty()) {
                render_surface(surface, surf_plot);
                outputs.emplace_back(surf_plot);
            }
            write_manifest(cfg, outputs, csv_path.string() + ".manifest.json");
            std::cout << "wrote " << csv_path.string() << "\n";
            return 0;
        }
        if (coll->parsed()) {
            std::uint64_t seed = 12345;
            if (const char* env = std::getenv("PILOTSIM_SEED")) {
                seed = std::strtoull(env, nullptr, 10);
            }
            if (coll_seed) {
                seed = *coll_seed;
            }
            Xoshiro256pp rng(substream_seed(seed, {0x7C5Au}));
            const auto distances = simulate_collision_distances(rng, coll_k, coll_slots);
            double mean = 0.0;
            std::uint64_t max_d = 1;
            for (auto d : distances) {
                mean += static_cast<double>(d);
                max_d = std::max(max_d, d);
            }
            mean = distances.empty() ? 0.0 : mean / static_cast<double>(distances.size());
            std::cout << "collisions: " << distances.size() << "\n"
                      << "mean distance: " << mean << "\n"
                      << "expected (K): " << expected_collision_distance(coll_k) << "\n";
            if (!coll_out.empty()) {
                std::vector<std::uint64_t> hist(max_d + 1, 0);
                for (auto d : distances) {
                    hist[d] += 1;
                }
                std::ofstream out(coll_out, std::ios::binary);
                if (!out) {
                    throw std::runtime_error("cannot write " + coll_out);
                }
                out << "d,count,expected\n";
                for (std::uint64_t d = 1; d <= max_d; ++d) {
                    out << d << "," << hist[d] << ","
                        << collision_pmf(d, coll_k) * static_cast<double>(distances.size())
                        << "\n";
                }
            }
            return 0;
        }
        if (self->parsed()) {
            return run_selftest();
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
