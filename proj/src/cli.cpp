// SPDX-License-Identifier: Apache-2.0
//
// pilotsim: pilot-hopping channel estimation simulator

#include "pilotsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pilotsim {

namespace {

std::string fmt_double(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt_exact(double v) { return fmt_double(v, "%.17g"); }

std::string fmt_cplx_exact(cplx v) {
    if (v.imag() == 0.0) {
        return fmt_exact(v.real());
    }
    return fmt_exact(v.real()) + "," + fmt_exact(v.imag());
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw std::invalid_argument("config key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            bad_key(key, "trailing characters in '" + value + "'");
        }
        return v;
    } catch (const std::invalid_argument&) {
        bad_key(key, "not a number: '" + value + "'");
    } catch (const std::out_of_range&) {
        bad_key(key, "out of range: '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) {
            bad_key(key, "trailing characters in '" + value + "'");
        }
        return v;
    } catch (const std::invalid_argument&) {
        bad_key(key, "not an integer: '" + value + "'");
    } catch (const std::out_of_range&) {
        bad_key(key, "out of range: '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "off") {
        return false;
    }
    bad_key(key, "expected true/false, got '" + value + "'");
}

cplx to_cplx(const std::string& key, const std::string& value) {
    const auto parts = split(value, ',');
    if (parts.size() == 1) {
        return {to_double(key, parts[0]), 0.0};
    }
    if (parts.size() == 2) {
        return {to_double(key, parts[0]), to_double(key, parts[1])};
    }
    bad_key(key, "expected 're' or 're,im'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) {
        if (!item.empty()) {
            out.push_back(to_double(key, item));
        }
    }
    if (out.empty()) {
        bad_key(key, "empty list");
    }
    return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

std::string join_doubles(const std::vector<double>& items) {
    std::vector<std::string> parts;
    parts.reserve(items.size());
    for (double v : items) {
        parts.push_back(fmt_exact(v));
    }
    return join(parts, ',');
}

}  // namespace

void apply_config_entry(SimConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "sigma_n2") {
        cfg.sigma_n2 = to_double(key, value);
    } else if (key == "L") {
        cfg.n_cells = to_u64(key, value);
    } else if (key == "K") {
        cfg.users_per_cell = to_u64(key, value);
    } else if (key == "tau") {
        cfg.tau = to_u64(key, value);
    } else if (key == "mu") {
        cfg.mu = to_double(key, value);
    } else if (key == "nu") {
        cfg.nu = to_double(key, value);
    } else if (key == "f_c") {
        cfg.f_c = to_double(key, value);
    } else if (key == "N_s") {
        cfg.n_scatterers = to_u64(key, value);
    } else if (key == "t_s") {
        cfg.t_s = to_double(key, value);
    } else if (key == "a0") {
        cfg.a0 = to_double(key, value);
    } else if (key == "h_hat0") {
        cfg.h_hat0 = to_cplx(key, value);
    } else if (key == "q0") {
        cfg.q0 = to_cplx(key, value);
    } else if (key == "p1") {
        cfg.p1 = to_double(key, value);
    } else if (key == "s1") {
        cfg.s1 = to_double(key, value);
    } else if (key == "sigma_c2") {
        cfg.sigma_c2 = to_double(key, value);
    } else if (key == "sir_db") {
        cfg.sir_db = to_double(key, value);
    } else if (key == "v_kmh") {
        cfg.v_kmh = to_double_list(key, value);
    } else if (key == "sir_grid_db") {
        cfg.sir_grid_db = to_double_list(key, value);
    } else if (key == "mode") {
        if (value == "idealized") {
            cfg.mode = ContaminationMode::kIdealized;
        } else if (value == "explicit") {
            cfg.mode = ContaminationMode::kExplicit;
        } else {
            bad_key(key, "expected 'idealized' or 'explicit', got '" + value + "'");
        }
    } else if (key == "hopping") {
        cfg.hopping = to_bool(key, value);
    } else if (key == "n_slots") {
        cfg.n_slots = to_u64(key, value);
    } else if (key == "n_realizations") {
        cfg.n_realizations = to_u64(key, value);
    } else if (key == "burn_in") {
        cfg.burn_in = to_u64(key, value);
    } else if (key == "master_seed") {
        cfg.master_seed = to_u64(key, value);
    } else if (key == "estimators") {
        std::vector<EstimatorKind> kinds;
        for (const auto& name : split(value, ',')) {
            if (!name.empty()) {
                kinds.push_back(parse_estimator(name));
            }
        }
        if (kinds.empty()) {
            bad_key(key, "empty estimator list");
        }
        cfg.estimators = std::move(kinds);
    } else if (key == "kalman_a") {
        cfg.kalman_a = to_double(key, value);
    } else if (key == "workers") {
        cfg.workers = to_u64(key, value);
    } else if (key == "divergence_limit") {
        cfg.divergence_limit = to_double(key, value);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg) {
    std::vector<std::string> est_names;
    est_names.reserve(cfg.estimators.size());
    for (EstimatorKind kind : cfg.estimators) {
        est_names.push_back(estimator_name(kind));
    }
    std::vector<std::pair<std::string, std::string>> entries = {
        {"sigma_n2", fmt_exact(cfg.sigma_n2)},
        {"L", std::to_string(cfg.n_cells)},
        {"K", std::to_string(cfg.users_per_cell)},
        {"tau", std::to_string(cfg.tau)},
        {"mu", fmt_exact(cfg.mu)},
        {"nu", fmt_exact(cfg.nu)},
        {"f_c", fmt_exact(cfg.f_c)},
        {"N_s", std::to_string(cfg.n_scatterers)},
        {"t_s", fmt_exact(cfg.t_s)},
        {"a0", fmt_exact(cfg.a0)},
        {"h_hat0", fmt_cplx_exact(cfg.h_hat0)},
        {"q0", fmt_cplx_exact(cfg.q0)},
        {"p1", fmt_exact(cfg.p1)},
        {"s1", fmt_exact(cfg.s1)},
    };
    if (cfg.sigma_c2) {
        entries.emplace_back("sigma_c2", fmt_exact(*cfg.sigma_c2));
    }
    if (cfg.sir_db) {
        entries.emplace_back("sir_db", fmt_exact(*cfg.sir_db));
    }
    entries.emplace_back("v_kmh", join_doubles(cfg.v_kmh));
    entries.emplace_back("sir_grid_db", join_doubles(cfg.sir_grid_db));
    entries.emplace_back("mode", cfg.mode == ContaminationMode::kIdealized ? "idealized"
                                                                           : "explicit");
    entries.emplace_back("hopping", cfg.hopping ? "true" : "false");
    entries.emplace_back("n_slots", std::to_string(cfg.n_slots));
    entries.emplace_back("n_realizations", std::to_string(cfg.n_realizations));
    entries.emplace_back("burn_in", std::to_string(cfg.burn_in));
    entries.emplace_back("master_seed", std::to_string(cfg.master_seed));
    entries.emplace_back("estimators", join(est_names, ','));
    entries.emplace_back("kalman_a", fmt_exact(cfg.kalman_a));
    entries.emplace_back("workers", std::to_string(cfg.workers));
    entries.emplace_back("divergence_limit", fmt_exact(cfg.divergence_limit));
    return entries;
}

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    SimConfig cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        // Run-manifest JSON; the resolved config lives under "config".
        const auto doc = nlohmann::json::parse(text);
        if (!doc.contains("config") || !doc["config"].is_object()) {
            throw std::invalid_argument("manifest '" + path.string() +
                                        "' has no config object");
        }
        for (const auto& [key, value] : doc["config"].items()) {
            apply_config_entry(cfg, key, value.get<std::string>());
        }
        return cfg;
    }

    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + line + "'");
        }
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string csv_to_string(const SweepResult& result) {
    std::string out = "estimator,v_kmh,sir_db,mse,std_err,n_samples,seed\n";
    for (const SweepRow& row : result.rows) {
        out += row.estimator;
        out += ',';
        out += fmt_double(row.v_kmh);
        out += ',';
        out += fmt_double(row.sir_db);
        out += ',';
        out += fmt_double(row.mse);
        out += ',';
        out += fmt_double(row.std_err);
        out += ',';
        out += std::to_string(row.n_samples);
        out += ',';
        out += std::to_string(row.seed);
        out += '\n';
    }
    return out;
}

void write_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write CSV to " + path.string());
    }
    out << csv_to_string(result);
    if (!out) {
        throw std::runtime_error("I/O failure while writing " + path.string());
    }
}

std::string surface_csv_to_string(const SurfaceResult& surface) {
    std::string out = "a,v_kmh,mse\n";
    for (std::size_t vi = 0; vi < surface.v_kmh.size(); ++vi) {
        for (std::size_t ai = 0; ai < surface.a_grid.size(); ++ai) {
            out += fmt_double(surface.a_grid[ai]);
            out += ',';
            out += fmt_double(surface.v_kmh[vi]);
            out += ',';
            out += fmt_double(surface.mse[vi * surface.a_grid.size() + ai]);
            out += '\n';
        }
    }
    return out;
}

void write_surface_csv(const SurfaceResult& surface, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write CSV to " + path.string());
    }
    out << surface_csv_to_string(surface);
    if (!out) {
        throw std::runtime_error("I/O failure while writing " + path.string());
    }
}

namespace {

constexpr const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                         "#9467bd", "#ff7f0e", "#8c564b"};

struct PlotFrame {
    double width = 720, height = 480;
    double left = 70, right = 690, top = 40, bottom = 430;

    double sx(double x, double x0, double x1) const {
        return x1 > x0 ? left + (x - x0) / (x1 - x0) * (right - left)
                       : 0.5 * (left + right);
    }
    double sy(double y, double y0, double y1) const {
        return y1 > y0 ? bottom - (y - y0) / (y1 - y0) * (bottom - top)
                       : 0.5 * (top + bottom);
    }
};

void svg_text(std::string& svg, double x, double y, const std::string& text,
              const char* anchor = "middle", int size = 12) {
    svg += "<text x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) +
           "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + text + "</text>\n";
}

}  // namespace

void render_plot(const SweepResult& result, SweepAxis axis,
                 const std::filesystem::path& path) {
    if (result.rows.empty()) {
        throw std::invalid_argument("render_plot: no rows to plot");
    }
    const bool mobility = axis == SweepAxis::kMobility;

    // Collect series in first-appearance order.
    std::vector<std::string> names;
    for (const auto& row : result.rows) {
        if (std::find(names.begin(), names.end(), row.estimator) == names.end()) {
            names.push_back(row.estimator);
        }
    }
    double x0 = 1e300, x1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    for (const auto& row : result.rows) {
        const double x = mobility ? row.v_kmh : row.sir_db;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        if (row.mse > 0.0 && std::isfinite(row.mse)) {
            ly0 = std::min(ly0, std::log10(row.mse));
            ly1 = std::max(ly1, std::log10(row.mse));
        }
    }
    if (ly0 > ly1) {
        ly0 = -2.0;
        ly1 = 0.0;
    }
    ly0 = std::floor(ly0);
    ly1 = std::ceil(ly1);
    if (ly1 == ly0) {
        ly1 = ly0 + 1.0;
    }

    PlotFrame f;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      fmt_double(f.width) + "\" height=\"" + fmt_double(f.height) +
                      "\" viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";

    // Gridlines and tick labels per decade of MSE.
    for (double d = ly0; d <= ly1 + 1e-9; d += 1.0) {
        const double y = f.sy(d, ly0, ly1);
        svg += "<line x1=\"" + fmt_double(f.left) + "\" y1=\"" + fmt_double(y) +
               "\" x2=\"" + fmt_double(f.right) + "\" y2=\"" + fmt_double(y) +
               "\" stroke=\"#dddddd\"/>\n";
        svg_text(svg, f.left - 8, y + 4, "1e" + fmt_double(d, "%.0f"), "end", 11);
    }
    // X ticks at the axis points of the first series.
    for (const auto& row : result.rows) {
        if (row.estimator != names.front()) {
            continue;
        }
        const double xv = mobility ? row.v_kmh : row.sir_db;
        const double x = f.sx(xv, x0, x1);
        svg += "<line x1=\"" + fmt_double(x) + "\" y1=\"" + fmt_double(f.bottom) +
               "\" x2=\"" + fmt_double(x) + "\" y2=\"" + fmt_double(f.bottom + 5) +
               "\" stroke=\"black\"/>\n";
        svg_text(svg, x, f.bottom + 18, fmt_double(xv, "%g"), "middle", 11);
    }
    svg += "<line x1=\"" + fmt_double(f.left) + "\" y1=\"" + fmt_double(f.bottom) +
           "\" x2=\"" + fmt_double(f.right) + "\" y2=\"" + fmt_double(f.bottom) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_double(f.left) + "\" y1=\"" + fmt_double(f.top) +
           "\" x2=\"" + fmt_double(f.left) + "\" y2=\"" + fmt_double(f.bottom) +
           "\" stroke=\"black\"/>\n";

    for (std::size_t si = 0; si < names.size(); ++si) {
        const char* color = kSeriesColors[si % std::size(kSeriesColors)];
        std::string points;
        for (const auto& row : result.rows) {
            if (row.estimator != names[si] || !(row.mse > 0.0) ||
                !std::isfinite(row.mse)) {
                continue;
            }
            const double x = f.sx(mobility ? row.v_kmh : row.sir_db, x0, x1);
            const double y = f.sy(std::log10(row.mse), ly0, ly1);
            points += fmt_double(x) + "," + fmt_double(y) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = f.top + 14 + 16 * static_cast<double>(si);
        svg += "<line x1=\"600\" y1=\"" + fmt_double(ly - 4) + "\" x2=\"624\" y2=\"" +
               fmt_double(ly - 4) + "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"/>\n";
        svg_text(svg, 630, ly, names[si], "start", 11);
    }

    svg_text(svg, 0.5 * (f.left + f.right), 470,
             mobility ? "mobility [km/h]" : "SIR [dB]");
    svg_text(svg, 0.5 * (f.left + f.right), 20, "MSE");
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write SVG to " + path.string());
    }
    out << svg;
    if (!out) {
        throw std::runtime_error("I/O failure while writing " + path.string());
    }
}

void render_surface(const SurfaceResult& surface, const std::filesystem::path& path) {
    if (surface.mse.empty()) {
        throw std::invalid_argument("render_surface: empty surface");
    }
    double lo = 1e300, hi = -1e300;
    for (double m : surface.mse) {
        if (m > 0.0 && std::isfinite(m)) {
            lo = std::min(lo, std::log10(m));
            hi = std::max(hi, std::log10(m));
        }
    }
    if (lo > hi) {
        lo = -2.0;
        hi = 0.0;
    }
    if (hi == lo) {
        hi = lo + 1.0;
    }

    PlotFrame f;
    const std::size_t na = surface.a_grid.size();
    const std::size_t nv = surface.v_kmh.size();
    const double cw = (f.right - f.left) / static_cast<double>(na);
    const double ch = (f.bottom - f.top) / static_cast<double>(nv);

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
                      "height=\"480\" viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    for (std::size_t vi = 0; vi < nv; ++vi) {
        for (std::size_t ai = 0; ai < na; ++ai) {
            const double m = surface.mse[vi * na + ai];
            double t = 0.0;
            if (m > 0.0 && std::isfinite(m)) {
                t = (std::log10(m) - lo) / (hi - lo);
            }
            // Two-stop blue->red ramp; low MSE is blue.
            const int rch = static_cast<int>(40 + 215 * t);
            const int bch = static_cast<int>(255 - 215 * t);
            const double x = f.left + cw * static_cast<double>(ai);
            const double y = f.bottom - ch * static_cast<double>(vi + 1);
            char color[16];
            std::snprintf(color, sizeof(color), "#%02x50%02x", rch, bch);
            svg += "<rect x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) +
                   "\" width=\"" + fmt_double(cw + 0.5) + "\" height=\"" +
                   fmt_double(ch + 0.5) + "\" fill=\"" + color + "\"/>\n";
        }
    }
    // Sparse a ticks.
    for (std::size_t ai = 0; ai < na; ai += std::max<std::size_t>(1, na / 10)) {
        const double x = f.left + cw * (static_cast<double>(ai) + 0.5);
        svg_text(svg, x, f.bottom + 16, fmt_double(surface.a_grid[ai], "%g"), "middle", 10);
    }
    for (std::size_t vi = 0; vi < nv; ++vi) {
        const double y = f.bottom - ch * (static_cast<double>(vi) + 0.5);
        svg_text(svg, f.left - 8, y + 4, fmt_double(surface.v_kmh[vi], "%g"), "end", 10);
    }
    svg_text(svg, 0.5 * (f.left + f.right), 470, "AR coefficient a");
    svg_text(svg, 20, 0.5 * (f.top + f.bottom), "v [km/h]", "middle", 12);
    svg_text(svg, 0.5 * (f.left + f.right), 20,
             "MSE, log color scale [1e" + fmt_double(lo, "%.1f") + ", 1e" +
                 fmt_double(hi, "%.1f") + "]");
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write SVG to " + path.string());
    }
    out << svg;
    if (!out) {
        throw std::runtime_error("I/O failure while writing " + path.string());
    }
}

void write_manifest(const SimConfig& cfg, const std::vector<std::filesystem::path>& outputs,
                    const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    doc["timestamp"] = stamp;
    doc["master_seed"] = cfg.master_seed;
    nlohmann::ordered_json config;
    for (const auto& [key, value] : config_entries(cfg)) {
        config[key] = value;
    }
    doc["config"] = std::move(config);
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& p : outputs) {
        outs.push_back(p.string());
    }
    doc["outputs"] = std::move(outs);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest to " + path.string());
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw std::runtime_error("I/O failure while writing " + path.string());
    }
}

}  // namespace pilotsim
