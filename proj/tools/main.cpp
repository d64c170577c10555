// Command-line front end: growth-rate sweeps, mode reconstruction, Fourier
// synthesis, eigenbasis export, semi-Galerkin simulation and the escape-time
// experiment, driven by a TOML config.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "bouss/config.hpp"
#include "bouss/experiments.hpp"
#include "bouss/io.hpp"

using namespace bouss;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

json manifest_base(const RunConfig& cfg) {
    json m;
    m["version"] = kVersion;
    m["config"] = cfg.to_json();
    return m;
}

std::vector<double> xi_grid_of(const RunConfig& cfg) {
    std::vector<double> g;
    for (int i = 0; i < cfg.xi_count; ++i) {
        const double t = i / double(cfg.xi_count - 1);
        g.push_back(cfg.xi_spacing == "log" ? cfg.xi_min * std::pow(cfg.xi_max / cfg.xi_min, t)
                                            : cfg.xi_min + (cfg.xi_max - cfg.xi_min) * t);
    }
    return g;
}

struct OneDim {
    Grid1D grid;
    Basis01 basis;
    SteadyProfile profile;
    explicit OneDim(const RunConfig& cfg)
        : grid(build_grid(cfg.n_nodes)),
          basis(build_basis(grid, cfg.n_basis)),
          profile(make_profile(cfg.profile)) {}
};

SynthBand pick_band(const RunConfig& cfg, const OneDim& d, const GrowthCurve& curve) {
    SynthBand band{cfg.f_center, cfg.f_width};
    if (band.halfwidth > 0.0) return band;
    if (curve.all_stable) throw std::runtime_error("synthesis: profile is RT-stable in the sweep");
    // default band: peak-centred, touching the half-peak level on the left
    const double half = 0.5 * curve.capital_lambda;
    auto lam_at = [&](double xi) {
        auto gp = growth_rate(d.basis, d.grid, d.profile, cfg.params, xi, cfg.root_tol);
        return gp.lambda0 ? *gp.lambda0 : -1.0;
    };
    double lo = curve.argmax_xi;
    while (lam_at(0.5 * lo) > half) lo *= 0.5;
    double a = 0.5 * lo, b = curve.argmax_xi;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (a + b);
        (lam_at(mid) < half ? a : b) = mid;
    }
    band.center = curve.argmax_xi;
    band.halfwidth = curve.argmax_xi - 0.5 * (a + b);
    return band;
}

int run_dispersion(const RunConfig& cfg) {
    Stopwatch sw;
    OneDim d(cfg);
    auto curve = dispersion_curve(d.basis, d.grid, d.profile, cfg.params, xi_grid_of(cfg), cfg.root_tol);

    CsvTable t;
    t.header = {"xi", "lambda0", "lambda_c", "phi_at_lambda0", "el_residual", "bc_res_top", "bc_res_bottom"};
    PlotSeries s0{"lambda0", {}, {}}, sc{"lambda_c", {}, {}};
    bool ordering_ok = true;
    const double cap = cfg.params.g * d.profile.max_abs_dtheta() / (2.0 * cfg.params.mu);
    for (const auto& p : curve.points) {
        std::vector<std::optional<double>> row(7);
        row[0] = p.xi;
        if (p.lambda0) row[1] = *p.lambda0;
        if (p.lambda_c) row[2] = *p.lambda_c;
        if (p.lambda0) {
            row[3] = p.phi_at_lambda0;
            row[4] = p.el_interior_residual;
            row[5] = p.bc_residuals.first;
            row[6] = p.bc_residuals.second;
        }
        t.rows.push_back(row);
        s0.x.push_back(p.xi);
        s0.y.push_back(p.lambda0 ? *p.lambda0 : std::nan(""));
        sc.x.push_back(p.xi);
        sc.y.push_back(p.lambda_c ? *p.lambda_c : std::nan(""));
        if (p.lambda0 && p.lambda_c)
            ordering_ok = ordering_ok && (*p.lambda0 < *p.lambda_c) && (*p.lambda_c <= cap + 1e-12);
    }
    write_csv(cfg.out_dir + "/curve.csv", t);
    PlotSpec spec;
    spec.title = "growth rate and critical threshold";
    spec.xlabel = "xi";
    spec.ylabel = "rate";
    spec.annotation = curve.all_stable
                          ? "all frequencies stable"
                          : "Lambda = " + format_double(curve.capital_lambda) +
                                " at xi = " + format_double(curve.argmax_xi);
    write_svg_plot(cfg.out_dir + "/curve.svg", {s0, sc}, spec);

    json m = manifest_base(cfg);
    m["derived"] = {{"Lambda", curve.capital_lambda},
                    {"argmax_xi", curve.argmax_xi},
                    {"all_stable", curve.all_stable}};
    m["flags"] = {{"ordering_ok", ordering_ok}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    std::cout << (curve.all_stable ? "all stable\n"
                                   : "Lambda = " + format_double(curve.capital_lambda) + " at xi = " +
                                         format_double(curve.argmax_xi) + "\n");
    return ordering_ok ? 0 : 3;
}

int run_mode(const RunConfig& cfg, double xi) {
    Stopwatch sw;
    OneDim d(cfg);
    if (xi == 0.0) {
        auto curve = dispersion_curve(d.basis, d.grid, d.profile, cfg.params, xi_grid_of(cfg), cfg.root_tol);
        if (curve.all_stable) throw std::runtime_error("mode: profile is RT-stable; no growth rate exists");
        xi = curve.argmax_xi;
    }
    auto gp = growth_rate(d.basis, d.grid, d.profile, cfg.params, xi, cfg.root_tol);
    if (!gp.lambda0) throw std::runtime_error("mode: stable at this frequency; no growing mode");
    auto mode = build_mode(gp, d.basis, d.profile, cfg.params);
    auto res = mode_residual(mode, d.grid, cfg.params);

    CsvTable t;
    t.header = {"x2", "u1", "u2", "varpi", "h"};
    for (int i = 0; i < d.grid.n; ++i) {
        const double y = d.grid.nodes[i];
        t.rows.push_back({y, mode.u1(y), mode.u2(y), mode.varpi(y), mode.h(y)});
    }
    write_csv(cfg.out_dir + "/mode.csv", t);

    json m = manifest_base(cfg);
    m["derived"] = {{"xi", xi}, {"lambda0", *gp.lambda0}, {"lambda_c", *gp.lambda_c}};
    m["residuals"] = {{"momentum_x", res.momentum_x}, {"momentum_y", res.momentum_y},
                      {"transport", res.transport},   {"divergence", res.divergence},
                      {"bc_u2", res.bc_u2},           {"bc_top", res.bc_top},
                      {"bc_bottom", res.bc_bottom}};
    const bool ok = res.max_all() < 1e-5;
    m["flags"] = {{"residuals_ok", ok}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    std::cout << "lambda0(" << format_double(xi) << ") = " << format_double(*gp.lambda0) << "\n";
    return ok ? 0 : 3;
}

int run_synth(const RunConfig& cfg) {
    Stopwatch sw;
    OneDim d(cfg);
    auto curve = dispersion_curve(d.basis, d.grid, d.profile, cfg.params, xi_grid_of(cfg), cfg.root_tol);
    SynthBand band = pick_band(cfg, d, curve);
    auto qmodes = synthesis_modes(d.basis, d.grid, d.profile, cfg.params, band, cfg.n_quad, cfg.root_tol);
    Eigen::VectorXd x1, wx1;
    default_x1_rule(band, cfg.x1_width_mult, x1, wx1);
    auto sf = synthesize(qmodes, band, cfg.times, x1, wx1, d.grid);

    CsvTable hk;
    hk.header = {"t", "h0", "h1", "h2"};
    std::vector<double> h1s;
    for (std::size_t it = 0; it < cfg.times.size(); ++it) {
        const double h0 = hk_norm(sf, 0, it), h1 = hk_norm(sf, 1, it), h2 = hk_norm(sf, 2, it);
        hk.rows.push_back({cfg.times[it], h0, h1, h2});
        h1s.push_back(h1);
    }
    write_csv(cfg.out_dir + "/hk_norms.csv", hk);

    bool envelope_ok = true;
    for (std::size_t it = 1; it < cfg.times.size(); ++it) {
        const double tt = cfg.times[it] - cfg.times[0];
        const double ratio = h1s[it] / h1s[0];
        envelope_ok = envelope_ok && ratio >= std::exp(sf.lambda_min * tt) * (1.0 - 1e-3) &&
                      ratio <= std::exp(sf.lambda_max * tt) * (1.0 + 1e-3);
    }

    for (std::size_t it = 0; it < cfg.times.size(); ++it) {
        CsvTable f;
        f.header = {"x1", "x2", "v1", "v2", "pi", "theta"};
        for (int i = 0; i < x1.size(); ++i)
            for (int j = 0; j < d.grid.n; ++j)
                f.rows.push_back({x1[i], d.grid.nodes[j], sf.at(it, 0)(i, j), sf.at(it, 1)(i, j),
                                  sf.at(it, 2)(i, j), sf.at(it, 3)(i, j)});
        write_csv(cfg.out_dir + "/fields_t" + std::to_string(it) + ".csv", f);
    }

    json m = manifest_base(cfg);
    m["derived"] = {{"Lambda", curve.capital_lambda},
                    {"argmax_xi", curve.argmax_xi},
                    {"f_center", band.center},
                    {"f_width", band.halfwidth},
                    {"lambda_min_band", sf.lambda_min},
                    {"lambda_max_band", sf.lambda_max},
                    {"n_quad_used", static_cast<int>(qmodes.size())},
                    {"x1_halfwidth", x1[x1.size() - 1]}};
    m["flags"] = {{"envelope_ok", envelope_ok}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    return envelope_ok ? 0 : 3;
}

int run_stokes_eigs(const RunConfig& cfg, int m_request) {
    Stopwatch sw;
    auto dom = make_domain(cfg.R, cfg.nx, cfg.ny);
    auto op = assemble_stokes(dom, cfg.params, cfg.resolved_mx(), cfg.resolved_my(), cfg.sector_kind());
    const int m = m_request > 0 ? m_request : cfg.m_modes;
    auto pairs = eigenpairs(op, m);
    auto ck = basis_checks(op, pairs);

    json idx;
    idx["R"] = cfg.R;
    idx["nx"] = cfg.nx;
    idx["ny"] = cfg.ny;
    idx["m"] = m;
    idx["lambdas"] = json::array();
    for (const auto& p : pairs) idx["lambdas"].push_back(p.lambda);
    write_json(cfg.out_dir + "/eigs.json", idx);

    for (int k = 0; k < m; ++k) {
        CsvTable f;
        f.header = {"x1", "x2", "e1", "e2", "p"};
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j)
                f.rows.push_back({dom.x[i], dom.y[j], pairs[k].e1(i, j), pairs[k].e2(i, j),
                                  pairs[k].p(i, j)});
        write_csv(cfg.out_dir + "/eigenpair_" + std::to_string(k + 1) + ".csv", f);
    }

    const bool ok = ck.l2_orthogonality_defect < 1e-8 && ck.energy_orthogonality_defect < 1e-6 &&
                    ck.max_divergence < 1e-8;
    json m2 = manifest_base(cfg);
    m2["checks"] = {{"l2_orthogonality_defect", ck.l2_orthogonality_defect},
                    {"energy_orthogonality_defect", ck.energy_orthogonality_defect},
                    {"max_divergence", ck.max_divergence},
                    {"bc_walls", ck.bc_walls},
                    {"bc_sides", ck.bc_sides},
                    {"bc_navier_top", ck.bc_navier_top},
                    {"bc_navier_bottom", ck.bc_navier_bottom},
                    {"c_l4", ck.c_l4},
                    {"c_linf", ck.c_linf},
                    {"bc_outliers", ck.bc_outliers}};
    m2["flags"] = {{"basis_ok", ok}};
    m2["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m2);
    std::cout << "lambda_1 = " << format_double(pairs[0].lambda) << "\n";
    return ok ? 0 : 3;
}

int run_simulate(const RunConfig& cfg) {
    Stopwatch sw;
    auto dom = make_domain(cfg.R, cfg.nx, cfg.ny);
    auto profile = make_profile(cfg.profile);
    auto op = assemble_stokes(dom, cfg.params, cfg.resolved_mx(), cfg.resolved_my(), cfg.sector_kind());
    auto pairs = eigenpairs(op, cfg.m_modes);

    SimConfig sc;
    sc.system = (cfg.system == "full") ? SystemKind::Full : SystemKind::Perturbed;
    sc.mode = (cfg.mode == "nonlinear") ? ModeKind::Nonlinear : ModeKind::Linearized;
    sc.dt = cfg.dt;
    sc.cfl = cfg.cfl;
    sc.interp_order = cfg.theta_interp;
    Simulator sim(op, pairs, profile, sc);

    // initial data
    json init_info;
    if (cfg.init == "zero") {
        init_info["kind"] = "zero";
    } else if (cfg.init == "stokes-mode") {
        if (cfg.init_index < 1 || cfg.init_index > cfg.m_modes)
            throw std::invalid_argument("config: simulation.init_index: out of range");
        Eigen::VectorXd f = Eigen::VectorXd::Zero(cfg.m_modes);
        f[cfg.init_index - 1] = cfg.init_amplitude;
        sim.set_velocity(f);
        init_info = {{"kind", "stokes-mode"}, {"index", cfg.init_index}};
    } else if (cfg.init == "growing-mode" || cfg.init == "synthesis") {
        OneDim d(cfg);
        if (cfg.init == "growing-mode") {
            double xi = cfg.init_xi;
            if (xi == 0.0) {
                auto curve =
                    dispersion_curve(d.basis, d.grid, d.profile, cfg.params, xi_grid_of(cfg), cfg.root_tol);
                if (curve.all_stable)
                    throw std::runtime_error("simulate: profile is RT-stable; no growth rate exists");
                xi = curve.argmax_xi;
            }
            auto gp = growth_rate(d.basis, d.grid, d.profile, cfg.params, xi, cfg.root_tol);
            if (!gp.lambda0) throw std::runtime_error("simulate: stable at init_xi; no growing mode");
            auto mode = build_mode(gp, d.basis, d.profile, cfg.params);
            Eigen::MatrixXd U1(dom.nx, dom.ny), U2(dom.nx, dom.ny), TH(dom.nx, dom.ny);
            for (int i = 0; i < dom.nx; ++i)
                for (int j = 0; j < dom.ny; ++j) {
                    const double x = dom.x[i], y = dom.y[j];
                    U1(i, j) = cfg.init_amplitude * mode.u1(y) * std::sin(xi * x);
                    U2(i, j) = cfg.init_amplitude * mode.u2(y) * std::cos(xi * x);
                    TH(i, j) = cfg.init_amplitude * mode.h(y) * std::cos(xi * x);
                }
            sim.set_velocity(sim.project_velocity(U1, U2));
            sim.set_theta(TH);
            init_info = {{"kind", "growing-mode"}, {"xi", xi}, {"lambda0", *gp.lambda0}};
        } else {
            auto curve =
                dispersion_curve(d.basis, d.grid, d.profile, cfg.params, xi_grid_of(cfg), cfg.root_tol);
            SynthBand band = pick_band(cfg, d, curve);
            auto qmodes =
                synthesis_modes(d.basis, d.grid, d.profile, cfg.params, band, cfg.n_quad, cfg.root_tol);
            Grid1D ygrid;
            ygrid.n = dom.ny;
            ygrid.nodes = dom.y;
            ygrid.weights = dom.wy;
            auto sf = synthesize(qmodes, band, {0.0}, dom.x, dom.wx, ygrid);
            sim.set_velocity(sim.project_velocity(cfg.init_amplitude * sf.at(0, 0),
                                                  cfg.init_amplitude * sf.at(0, 1)));
            sim.set_theta(cfg.init_amplitude * sf.at(0, 3));
            init_info = {{"kind", "synthesis"}, {"f_center", band.center}, {"f_width", band.halfwidth}};
        }
    } else if (cfg.init == "bump") {
        Eigen::MatrixXd U1(dom.nx, dom.ny), U2(dom.nx, dom.ny), TH(dom.nx, dom.ny);
        const double w = 0.8 * cfg.R, h = 1e-6;
        auto psi = [&](double x, double y) {
            const double u = x / w;
            if (std::abs(u) >= 1.0) return 0.0;
            const double b = 1.0 - u * u;
            return cfg.init_amplitude * u * b * b * b * std::sin(std::acos(-1.0) * y);
        };
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) {
                const double x = dom.x[i], y = dom.y[j];
                U1(i, j) = (psi(x, y + h) - psi(x, y - h)) / (2 * h);
                U2(i, j) = -(psi(x + h, y) - psi(x - h, y)) / (2 * h);
                const double u = x / w, v = (y - 0.5) / 0.35;
                TH(i, j) = (std::abs(u) < 1 && std::abs(v) < 1)
                               ? 0.5 * std::pow(1 - u * u, 3) * std::pow(1 - v * v, 3)
                               : 0.0;
            }
        sim.set_velocity(sim.project_velocity(U1, U2));
        sim.set_theta(TH);
        init_info["kind"] = "bump";
    }

    // refuse clearly unstable time steps before stepping
    if (sim.cfl_number(sim.state().f, cfg.dt) > cfg.cfl)
        throw std::invalid_argument("simulate: dt violates the CFL condition for the initial data");

    CsvTable diag;
    diag.header = {"t", "energy", "grad_u_sq", "theta_l2", "theta_l4", "v2_l2", "cfl"};
    auto push = [&](const Diagnostics& dg) {
        diag.rows.push_back({dg.t, dg.kinetic, dg.grad_u_sq, dg.theta_l2, dg.theta_l4, dg.v2_l2, dg.cfl});
    };
    push(sim.diagnostics());
    PlotSeries v2s{"v2_l2", {0.0}, {sim.diagnostics().v2_l2}};
    bool bounds_ok = true;
    const long nsteps = static_cast<long>(std::llround(cfg.T / cfg.dt));
    std::size_t next_snap = 0;
    std::vector<double> snap_sorted = cfg.snapshot_times;
    std::sort(snap_sorted.begin(), snap_sorted.end());
    auto write_snapshot = [&](int idx) {
        CsvTable f;
        f.header = {"x1", "x2", "v1", "v2", "theta"};
        Eigen::MatrixXd u1, u2;
        sim.velocity_fields(sim.state().f, u1, u2);
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j)
                f.rows.push_back({dom.x[i], dom.y[j], u1(i, j), u2(i, j), sim.theta().vals(i, j)});
        write_csv(cfg.out_dir + "/snapshot_" + std::to_string(idx) + ".csv", f);
    };
    for (long s = 1; s <= nsteps; ++s) {
        sim.step();
        const auto dg = sim.diagnostics();
        push(dg);
        v2s.x.push_back(dg.t);
        v2s.y.push_back(dg.v2_l2);
        bounds_ok = bounds_ok && dg.energy_bound_ok;
        while (next_snap < snap_sorted.size() && sim.state().t >= snap_sorted[next_snap] - 0.5 * cfg.dt) {
            write_snapshot(static_cast<int>(next_snap));
            ++next_snap;
        }
    }
    write_csv(cfg.out_dir + "/diagnostics.csv", diag);

    // fitted growth of the vertical velocity norm
    double slope = 0.0;
    {
        double st = 0, sl = 0, stt = 0, stl = 0;
        int n = 0;
        for (std::size_t i = 0; i < v2s.x.size(); ++i) {
            if (!(v2s.y[i] > 0.0)) continue;
            const double l = std::log(v2s.y[i]);
            st += v2s.x[i];
            sl += l;
            stt += v2s.x[i] * v2s.x[i];
            stl += v2s.x[i] * l;
            ++n;
        }
        if (n >= 3) slope = (n * stl - st * sl) / (n * stt - st * st);
    }
    PlotSpec spec;
    spec.title = "vertical velocity norm";
    spec.xlabel = "t";
    spec.ylabel = "|v2|";
    spec.logy = true;
    spec.annotation = "fitted slope = " + format_double(slope);
    write_svg_plot(cfg.out_dir + "/growth.svg", {v2s}, spec);

    json m = manifest_base(cfg);
    m["init"] = init_info;
    m["derived"] = {{"fitted_v2_slope", slope}};
    m["flags"] = {{"bounds_ok", bounds_ok}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    return bounds_ok ? 0 : 3;
}

int run_rt_experiment(const RunConfig& cfg) {
    Stopwatch sw;
    RtExperimentConfig ec;
    ec.params = cfg.params;
    ec.profile = cfg.profile;
    ec.n_nodes = cfg.n_nodes;
    ec.n_basis = cfg.n_basis;
    ec.xi_min = std::max(cfg.xi_min, 0.05);
    ec.xi_max = cfg.xi_max;
    ec.xi_count = std::min(cfg.xi_count, 41);
    ec.root_tol = cfg.root_tol;
    ec.band_center = cfg.f_center;
    ec.band_halfwidth = cfg.f_width;
    ec.n_quad = cfg.n_quad;
    ec.R = cfg.R;
    ec.nx = cfg.nx;
    ec.ny = cfg.ny;
    ec.mx = cfg.resolved_mx();
    ec.my = cfg.resolved_my();
    ec.m_modes = cfg.m_modes;
    ec.sector = cfg.sector_kind();
    ec.dt = cfg.dt;
    ec.cfl = cfg.cfl;
    ec.K = cfg.K;
    ec.epsilons = cfg.epsilons;
    if (cfg.T > 0.0) ec.T_max = cfg.T;
    auto rep = rt_experiment(ec);

    CsvTable lin;
    lin.header = {"t", "v2_l2"};
    for (const auto& s : rep.linear_series) lin.rows.push_back({s.t, s.v2});
    write_csv(cfg.out_dir + "/linear_series.csv", lin);
    std::vector<PlotSeries> plots;
    PlotSeries pl{"linearized", {}, {}};
    for (const auto& s : rep.linear_series) {
        pl.x.push_back(s.t);
        pl.y.push_back(s.v2);
    }
    plots.push_back(pl);
    json runs = json::array();
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const auto& r = rep.runs[i];
        CsvTable t;
        t.header = {"t", "v2_l2"};
        PlotSeries ps{"eps=" + format_double(r.eps), {}, {}};
        for (const auto& s : r.series) {
            t.rows.push_back({s.t, s.v2});
            ps.x.push_back(s.t);
            ps.y.push_back(s.v2 / r.eps);
        }
        ps.label += " (rescaled)";
        plots.push_back(ps);
        write_csv(cfg.out_dir + "/eps_series_" + std::to_string(i) + ".csv", t);
        runs.push_back({{"eps", r.eps},
                        {"fitted_exponent", r.fitted_exponent},
                        {"crossed", r.crossed},
                        {"t_cross", r.t_cross},
                        {"max_rescaled_deviation", r.max_rescaled_deviation}});
    }
    PlotSpec spec;
    spec.title = "escape-time experiment";
    spec.xlabel = "t";
    spec.ylabel = "|v2| (rescaled)";
    spec.logy = true;
    spec.annotation = "linear fitted slope = " + format_double(rep.linear_fitted_exponent) +
                      ", Lambda = " + format_double(rep.Lambda);
    write_svg_plot(cfg.out_dir + "/escape.svg", plots, spec);

    json m = manifest_base(cfg);
    m["derived"] = {{"Lambda", rep.Lambda},
                    {"argmax_xi", rep.xi_star},
                    {"lambda_f", rep.lambda_f},
                    {"f_center", rep.band_center},
                    {"f_width", rep.band_halfwidth},
                    {"delta0", rep.delta0},
                    {"tau0", rep.tau0},
                    {"t_K", rep.t_K},
                    {"threshold_linear", rep.threshold_linear},
                    {"dt_used", rep.dt_used},
                    {"fit_window", rep.fit_window},
                    {"projection_quality", rep.projection_quality},
                    {"linear_fitted_exponent", rep.linear_fitted_exponent},
                    {"linear_v2_at_tK", rep.linear_v2_at_tK}};
    m["runs"] = runs;
    m["flags"] = {{"linear_prediction_ok", rep.linear_prediction_ok}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    std::cout << "t_K = " << format_double(rep.t_K)
              << ", linear |v2|(t_K) = " << format_double(rep.linear_v2_at_tK)
              << " vs threshold " << format_double(rep.threshold_linear) << "\n";
    return rep.linear_prediction_ok ? 0 : 3;
}

int run_r_sweep(const RunConfig& cfg) {
    Stopwatch sw;
    RSweepConfig rc;
    rc.params = cfg.params;
    rc.profile = cfg.profile;
    rc.r_list = cfg.r_list;
    rc.ny = cfg.ny;
    rc.dt = cfg.dt;
    rc.cfl = cfg.cfl;
    rc.T = cfg.T;
    auto rep = r_sweep(rc);

    CsvTable t;
    t.header = {"R", "t", "energy", "grad_u_sq", "theta_l2", "theta_l4", "v2_l2", "cfl"};
    for (const auto& run : rep.runs)
        for (const auto& dg : run.series)
            t.rows.push_back(
                {run.r, dg.t, dg.kinetic, dg.grad_u_sq, dg.theta_l2, dg.theta_l4, dg.v2_l2, dg.cfl});
    write_csv(cfg.out_dir + "/diagnostics.csv", t);

    bool bounds_ok = true;
    json runs = json::array();
    for (const auto& run : rep.runs) {
        bounds_ok = bounds_ok && run.bounds_ok;
        runs.push_back({{"R", run.r},
                        {"modes", run.modes},
                        {"sup_kinetic", run.sup_kinetic},
                        {"sup_grad", run.sup_grad},
                        {"theta_l2_drift", run.theta_l2_drift},
                        {"bounds_ok", run.bounds_ok}});
    }
    json m = manifest_base(cfg);
    m["runs"] = runs;
    m["derived"] = {{"kinetic_spread", rep.kinetic_spread}, {"grad_spread", rep.grad_spread}};
    m["flags"] = {{"bounds_ok", bounds_ok}, {"spread_ok", rep.kinetic_spread < 0.05}};
    m["timings"] = {{"total_s", sw.seconds()}};
    write_json(cfg.out_dir + "/manifest.json", m);
    std::cout << "sup-energy spread = " << format_double(rep.kinetic_spread) << "\n";
    return (bounds_ok && rep.kinetic_spread < 0.05) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"growth rates, growing modes and semi-Galerkin runs for the wall-slip convection model"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    app.add_option("--config", config_path, "TOML run configuration");
    app.add_option("--out", out_override, "output directory (overrides the config)");

    auto* cmd_disp = app.add_subcommand("dispersion", "sweep the growth-rate curve");
    auto* cmd_mode = app.add_subcommand("mode", "reconstruct a growing mode at one frequency");
    double xi_opt = 0.0;
    cmd_mode->add_option("--xi", xi_opt, "frequency (default: curve peak)");
    auto* cmd_synth = app.add_subcommand("synth", "synthesize a growing solution on the strip");
    double fc = -1.0, fw = -1.0;
    std::vector<double> times_opt;
    cmd_synth->add_option("--f-center", fc, "band centre");
    cmd_synth->add_option("--f-width", fw, "band halfwidth");
    cmd_synth->add_option("--times", times_opt, "evaluation times");
    auto* cmd_eigs = app.add_subcommand("stokes-eigs", "export the divergence-free eigenbasis");
    double R_opt = 0.0;
    int m_opt = 0;
    cmd_eigs->add_option("--R", R_opt, "box half-width");
    cmd_eigs->add_option("--m", m_opt, "number of eigenpairs");
    auto* cmd_sim = app.add_subcommand("simulate", "advance the coupled system");
    std::string sys_opt, mode_opt;
    cmd_sim->add_option("--system", sys_opt, "full | perturbed");
    cmd_sim->add_option("--mode", mode_opt, "linearized | nonlinear");
    auto* cmd_rt = app.add_subcommand("rt-experiment", "scaled-data escape-time experiment");
    std::vector<double> eps_opt;
    double K_opt = 0.0;
    cmd_rt->add_option("--epsilon", eps_opt, "scaling factors");
    cmd_rt->add_option("--K", K_opt, "threshold multiplier");
    auto* cmd_rs = app.add_subcommand("r-sweep", "identical data on boxes of increasing width");
    std::vector<double> rlist_opt;
    cmd_rs->add_option("--R-list", rlist_opt, "box half-widths");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);

        if (cmd_disp->parsed()) return run_dispersion(cfg);
        if (cmd_mode->parsed()) return run_mode(cfg, xi_opt);
        if (cmd_synth->parsed()) {
            if (fc >= 0.0) cfg.f_center = fc;
            if (fw >= 0.0) cfg.f_width = fw;
            if (!times_opt.empty()) cfg.times = times_opt;
            return run_synth(cfg);
        }
        if (cmd_eigs->parsed()) {
            if (R_opt > 0.0) cfg.R = R_opt;
            return run_stokes_eigs(cfg, m_opt);
        }
        if (cmd_sim->parsed()) {
            if (!sys_opt.empty()) cfg.system = sys_opt;
            if (!mode_opt.empty()) cfg.mode = mode_opt;
            if (cfg.system != "full" && cfg.system != "perturbed")
                throw std::invalid_argument("simulate: --system must be full or perturbed");
            if (cfg.mode != "linearized" && cfg.mode != "nonlinear")
                throw std::invalid_argument("simulate: --mode must be linearized or nonlinear");
            return run_simulate(cfg);
        }
        if (cmd_rt->parsed()) {
            if (!eps_opt.empty()) cfg.epsilons = eps_opt;
            if (K_opt > 0.0) cfg.K = K_opt;
            return run_rt_experiment(cfg);
        }
        if (cmd_rs->parsed()) {
            if (!rlist_opt.empty()) cfg.r_list = rlist_opt;
            return run_r_sweep(cfg);
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("parse error") != std::string::npos || what.find("cannot open") != std::string::npos) {
            std::cerr << "config error: " << what << "\n";
            return 2;
        }
        std::cerr << "numerical failure: " << what << "\n";
        return 3;
    }
    return 0;
}
