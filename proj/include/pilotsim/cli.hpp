// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pilotsim/harness.hpp"

namespace pilotsim {

inline constexpr const char* kToolName = "pilotsim";
inline constexpr const char* kToolVersion = "1.0.0";

/// Parses a flat `key = value` config file (keys mirror the simulation
/// parameter table; '#' starts a comment) or a previously written run
/// manifest (JSON). Unknown keys and out-of-range values raise
/// std::invalid_argument naming the offending key.
SimConfig parse_config(const std::filesystem::path& path);

/// Applies one `key = value` pair onto cfg; shared by file parsing and
/// manifest round-tripping.
void apply_config_entry(SimConfig& cfg, const std::string& key, const std::string& value);

/// Resolved config as the flat key set (deterministic key order).
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg);

/// CSV with header estimator,v_kmh,sir_db,mse,std_err,n_samples,seed and
/// 9-significant-digit decimals. Byte-identical for identical results.
std::string csv_to_string(const SweepResult& result);
void write_csv(const SweepResult& result, const std::filesystem::path& path);

std::string surface_csv_to_string(const SurfaceResult& surface);
void write_surface_csv(const SurfaceResult& surface, const std::filesystem::path& path);

/// Static SVG: one polyline per estimator, log-scale MSE axis.
void render_plot(const SweepResult& result, SweepAxis axis,
                 const std::filesystem::path& path);

/// Static SVG heatmap of MSE over (a, v).
void render_surface(const SurfaceResult& surface, const std::filesystem::path& path);

/// Provenance sidecar written next to every output file: tool version,
/// timestamp, seed and the resolved config. Re-parsing it with parse_config
/// yields the identical SimConfig.
void write_manifest(const SimConfig& cfg, const std::vector<std::filesystem::path>& outputs,
                    const std::filesystem::path& path);

}  // namespace pilotsim
