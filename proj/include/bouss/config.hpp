#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bouss/experiments.hpp"

namespace bouss {

// Parse a TOML document (the subset used by the run configs: tables, dotted
// headers, key = value with strings, numbers, booleans, arrays and inline
// tables, '#' comments) into a JSON object. Throws std::runtime_error with a
// line number on malformed input.
nlohmann::json parse_toml(const std::string& text);
nlohmann::json load_toml_file(const std::string& path);

// Fully validated run configuration with defaults applied.
struct RunConfig {
    PhysicalParams params{1.0, 1.0, 0.0, 0.0};
    ProfileSpec profile = LinearProfile{-1.0};

    // one-dimensional solver
    int n_nodes = 96;
    int n_basis = 64;
    double root_tol = 1e-10;

    // frequency sweep
    double xi_min = 0.1, xi_max = 50.0;
    int xi_count = 64;
    std::string xi_spacing = "log";  // "log" or "linear"

    // synthesis
    double f_center = 0.0, f_width = 0.0;  // 0 = derived from the curve peak
    int n_quad = 33;
    double x1_width_mult = 4.0;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0};

    // simulation box
    double R = 1.0;
    int nx = 64, ny = 32;
    int mx = 0, my = 0;  // 0 = derived from nx, ny
    int m_modes = 24;
    std::string sector = "full";  // "full", "odd", "even"
    double dt = 1e-3, cfl = 0.5, T = 1.0;
    std::string system = "perturbed";    // "full" or "perturbed"
    std::string mode = "linearized";     // "linearized" or "nonlinear"
    int theta_interp = 6;
    std::string init = "zero";  // zero | stokes-mode | growing-mode | synthesis | bump
    int init_index = 1;         // stokes mode number (1-based)
    double init_xi = 0.0;       // growing-mode frequency (0 = curve peak)
    double init_amplitude = 1.0;
    std::vector<double> snapshot_times;

    // escape-time experiment
    std::vector<double> epsilons{1e-3, 1e-4, 1e-5};
    double K = 1.0;

    // box-width sweep
    std::vector<double> r_list{1.0, 2.0, 4.0};

    std::string out_dir = "out";

    // resolved helpers
    Sector sector_kind() const;
    int resolved_mx() const;
    int resolved_my() const;

    // validated construction; throws std::invalid_argument with a field path
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

RunConfig load_config(const std::string& path);

}  // namespace bouss
