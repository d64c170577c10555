#pragma once

#include <vector>

#include "bouss/modes.hpp"
#include "bouss/simulator.hpp"

namespace bouss {

// Escape-time experiment: evolve the nonlinear perturbed system from scaled
// copies of a synthesized growing solution and compare against the linearized
// evolution of the same datum.
struct RtExperimentConfig {
    PhysicalParams params{1.0, 1.0, 0.0, 0.0};
    ProfileSpec profile = LinearProfile{-1.0};
    // one-dimensional solver resolution and sweep
    int n_nodes = 96, n_basis = 64;
    double xi_min = 0.3, xi_max = 20.0;
    int xi_count = 33;
    double root_tol = 1e-10;
    // synthesis band; zero halfwidth selects [level-set, mirrored] around the peak
    double band_center = 0.0, band_halfwidth = 0.0;
    int n_quad = 33;
    // simulation box
    double R = 8.0;
    int nx = 192, ny = 32;
    int mx = 28, my = 14, m_modes = 24;
    Sector sector = Sector::Odd;
    double dt = 0.04, cfl = 0.5;  // dt is capped by modal stiffness at run time
    // experiment parameters
    double K = 1.0;
    std::vector<double> epsilons{1e-3, 1e-4, 1e-5};
    double fit_window = 0.0;  // 0 -> 0.5 / Lambda
    double T_max = 0.0;       // 0 -> t_K
    int sample_stride = 20;
};

struct SeriesSample {
    double t = 0.0;
    double v2 = 0.0;
};

struct EpsilonRun {
    double eps = 0.0;
    double fitted_exponent = 0.0;
    bool crossed = false;
    double t_cross = 0.0;
    double max_rescaled_deviation = 0.0;  // max_t ||v_eps/eps - v_lin||_L2 over the window
    std::vector<SeriesSample> series;
};

struct RtExperimentReport {
    double Lambda = 0.0, xi_star = 0.0, lambda_f = 0.0;
    double band_center = 0.0, band_halfwidth = 0.0;
    double delta0 = 0.0, tau0 = 0.0, t_K = 0.0, K = 0.0;
    double threshold_linear = 0.0;  // 2 K delta0
    double projection_quality = 0.0;  // ||P v0|| / ||v0||
    double linear_fitted_exponent = 0.0;
    double linear_v2_at_tK = 0.0;
    bool linear_prediction_ok = false;
    std::vector<SeriesSample> linear_series;
    std::vector<EpsilonRun> runs;
    double fit_window = 0.0;
    double dt_used = 0.0;
};

RtExperimentReport rt_experiment(const RtExperimentConfig& cfg);

// Identical compact data evolved on boxes of increasing width; reports the
// spread of the sup-in-time energy diagnostics across widths.
struct RSweepConfig {
    PhysicalParams params{1.0, 1.0, 0.0, 0.0};
    ProfileSpec profile = LinearProfile{-1.0};
    std::vector<double> r_list{1.0, 2.0, 4.0};
    int nx_per_unit = 40;
    int ny = 32;
    int my = 12;
    double lambda_cut = 150.0;  // retain eigenpairs below this rate
    double dt = 0.01, cfl = 0.5, T = 1.0;
    double amplitude = 0.2;        // velocity bump scale
    double theta_amplitude = 0.5;  // temperature bump scale
    double support = 0.8;  // bump half-width; must fit inside the smallest box
};

struct RSweepReport {
    struct PerR {
        double r = 0.0;
        int modes = 0;
        double sup_kinetic = 0.0, sup_grad = 0.0;
        double theta_l2_drift = 0.0;
        bool bounds_ok = true;
        std::vector<Diagnostics> series;
    };
    std::vector<PerR> runs;
    double kinetic_spread = 0.0;  // relative to the widest box
    double grad_spread = 0.0;
};

RSweepReport r_sweep(const RSweepConfig& cfg);

}  // namespace bouss
