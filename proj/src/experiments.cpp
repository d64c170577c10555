#include "bouss/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bouss {

namespace {

double fit_slope(const std::vector<SeriesSample>& s, double tmax) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    int n = 0;
    for (const auto& p : s) {
        if (p.t > tmax || !(p.v2 > 0.0)) continue;
        const double l = std::log(p.v2);
        st += p.t;
        sl += l;
        stt += p.t * p.t;
        stl += p.t * l;
        ++n;
    }
    if (n < 3) throw std::runtime_error("fit_slope: not enough samples");
    return (n * stl - st * sl) / (n * stt - st * st);
}

}  // namespace

RtExperimentReport rt_experiment(const RtExperimentConfig& cfg) {
    RtExperimentReport rep;
    rep.K = cfg.K;
    auto profile = make_profile(cfg.profile);
    if (rt_unstable_region(profile).empty())
        throw std::invalid_argument("rt_experiment: profile is RT-stable; no growth rate exists");
    for (double e : cfg.epsilons)
        if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("rt_experiment: epsilon must lie in (0,1)");

    // 1) growth-rate curve and its peak
    auto grid = build_grid(cfg.n_nodes);
    auto basis = build_basis(grid, cfg.n_basis);
    std::vector<double> xi_grid;
    for (int i = 0; i < cfg.xi_count; ++i)
        xi_grid.push_back(cfg.xi_min * std::pow(cfg.xi_max / cfg.xi_min, i / double(cfg.xi_count - 1)));
    auto curve = dispersion_curve(basis, grid, profile, cfg.params, xi_grid, cfg.root_tol);
    if (curve.all_stable) throw std::invalid_argument("rt_experiment: no unstable frequency in the sweep");
    rep.Lambda = curve.capital_lambda;
    rep.xi_star = curve.argmax_xi;

    // 2) synthesis band with the slowest retained rate at half the peak rate
    SynthBand band{cfg.band_center, cfg.band_halfwidth};
    if (!(band.halfwidth > 0.0)) {
        const double half = 0.5 * rep.Lambda;
        auto lam_at = [&](double xi) {
            auto gp = growth_rate(basis, grid, profile, cfg.params, xi, cfg.root_tol);
            return gp.lambda0 ? *gp.lambda0 : -1.0;
        };
        double lo = rep.xi_star;
        while (lam_at(0.5 * lo) > half) lo *= 0.5;
        double a = 0.5 * lo, b = rep.xi_star;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (a + b);
            (lam_at(mid) < half ? a : b) = mid;
        }
        const double xi_a = 0.5 * (a + b);
        band.center = rep.xi_star;
        band.halfwidth = rep.xi_star - xi_a;
    }
    rep.band_center = band.center;
    rep.band_halfwidth = band.halfwidth;

    auto qmodes = synthesis_modes(basis, grid, profile, cfg.params, band, cfg.n_quad, cfg.root_tol);
    rep.lambda_f = 1e300;
    for (const auto& q : qmodes) rep.lambda_f = std::min(rep.lambda_f, q.mode.lambda0);

    // 3) sample the datum on the simulation box
    auto dom = make_domain(cfg.R, cfg.nx, cfg.ny);
    Grid1D ygrid;
    ygrid.n = dom.ny;
    ygrid.nodes = dom.y;
    ygrid.weights = dom.wy;
    Eigen::VectorXd wx_for_norms = dom.wx;
    auto sf = synthesize(qmodes, band, {0.0}, dom.x, wx_for_norms, ygrid);

    auto l2sq = [&](const Eigen::MatrixXd& a) {
        double s = 0.0;
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) s += dom.wx[i] * dom.wy[j] * a(i, j) * a(i, j);
        return s;
    };
    double d2 = 0.0;
    for (int f = 0; f < 2; ++f)  // velocity in H^2
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; i + j <= 2; ++j) d2 += l2sq(sf.at(0, f, i, j));
    for (int i = 0; i <= 1; ++i)  // temperature in H^1
        for (int j = 0; i + j <= 1; ++j) d2 += l2sq(sf.at(0, 3, i, j));
    rep.delta0 = std::sqrt(d2);
    const double v2_0 = std::sqrt(l2sq(sf.at(0, 1)));
    rep.tau0 = v2_0 / rep.delta0;
    rep.t_K = (2.0 / rep.Lambda) * std::log(2.0 * cfg.K / rep.tau0);
    rep.threshold_linear = 2.0 * cfg.K * rep.delta0;
    const double t_end = (cfg.T_max > 0.0) ? std::min(cfg.T_max, rep.t_K) : rep.t_K;
    rep.fit_window = (cfg.fit_window > 0.0) ? cfg.fit_window : 0.5 / rep.Lambda;

    // 4) modal basis on the box, shared by all runs
    auto op = assemble_stokes(dom, cfg.params, cfg.mx, cfg.my, cfg.sector);
    auto pairs = eigenpairs(op, cfg.m_modes);

    SimConfig simcfg;
    simcfg.system = SystemKind::Perturbed;
    simcfg.dt = std::min(cfg.dt, 2.5 / pairs.back().lambda);
    simcfg.cfl = cfg.cfl;
    rep.dt_used = simcfg.dt;

    const Eigen::MatrixXd V1 = sf.at(0, 0), V2 = sf.at(0, 1), TH = sf.at(0, 3);

    // 5) linearized reference run to t_K
    std::vector<Eigen::VectorXd> lin_snapshots;
    std::vector<double> lin_times;
    double lin_v2_tk = 0.0;
    {
        simcfg.mode = ModeKind::Linearized;
        Simulator sim(op, pairs, profile, simcfg);
        Eigen::VectorXd f0 = sim.project_velocity(V1, V2);
        rep.projection_quality = std::sqrt(f0.squaredNorm() / (l2sq(V1) + l2sq(V2)));
        sim.set_velocity(f0);
        sim.set_theta(TH);
        const long nsteps = static_cast<long>(std::llround(t_end / simcfg.dt));
        rep.linear_series.push_back({0.0, sim.v2_l2(sim.state().f)});
        lin_snapshots.push_back(sim.state().f);
        lin_times.push_back(0.0);
        for (long s = 1; s <= nsteps; ++s) {
            sim.step();
            if (s % cfg.sample_stride == 0 || s == nsteps) {
                rep.linear_series.push_back({sim.state().t, sim.v2_l2(sim.state().f)});
                if (sim.state().t <= rep.fit_window * 1.0001) {
                    lin_snapshots.push_back(sim.state().f);
                    lin_times.push_back(sim.state().t);
                }
            }
        }
        lin_v2_tk = sim.v2_l2(sim.state().f);
        rep.linear_v2_at_tK = lin_v2_tk;
        rep.linear_fitted_exponent = fit_slope(rep.linear_series, rep.fit_window);
        rep.linear_prediction_ok =
            (cfg.T_max > 0.0 && t_end < rep.t_K) ? false : (lin_v2_tk >= rep.threshold_linear * 0.9);
    }

    // 6) scaled nonlinear runs
    simcfg.mode = ModeKind::Nonlinear;
    for (double eps : cfg.epsilons) {
        Simulator sim(op, pairs, profile, simcfg);
        Eigen::VectorXd f0 = sim.project_velocity(V1, V2);
        sim.set_velocity(eps * f0);
        sim.set_theta(eps * TH);
        EpsilonRun run;
        run.eps = eps;
        const double cross_level = cfg.K * rep.delta0 * eps;
        const long nsteps = static_cast<long>(std::llround(t_end / simcfg.dt));
        run.series.push_back({0.0, sim.v2_l2(sim.state().f)});
        std::size_t snap = 1;
        for (long s = 1; s <= nsteps; ++s) {
            sim.step();
            const double v2 = sim.v2_l2(sim.state().f);
            const bool at_sample = (s % cfg.sample_stride == 0 || s == nsteps);
            if (at_sample) run.series.push_back({sim.state().t, v2});
            if (!run.crossed && v2 > cross_level) {
                run.crossed = true;
                run.t_cross = sim.state().t;
            }
            if (at_sample && snap < lin_snapshots.size() &&
                std::abs(sim.state().t - lin_times[snap]) < 0.5 * simcfg.dt) {
                const double dev = (sim.state().f / eps - lin_snapshots[snap]).norm();
                run.max_rescaled_deviation = std::max(run.max_rescaled_deviation, dev);
                ++snap;
            }
            if (run.crossed && sim.state().t > rep.fit_window) break;
        }
        run.fitted_exponent = fit_slope(run.series, rep.fit_window);
        rep.runs.push_back(std::move(run));
    }
    return rep;
}

RSweepReport r_sweep(const RSweepConfig& cfg) {
    RSweepReport rep;
    auto profile = make_profile(cfg.profile);
    const double rmin = *std::min_element(cfg.r_list.begin(), cfg.r_list.end());
    if (!(cfg.support < rmin))
        throw std::invalid_argument("r_sweep: initial data support violates the smallest box");

    // compact stream bump (odd in x so the nonlinear dynamics stay in-sector
    // on symmetric boxes) and a compact temperature bump
    const double a = cfg.amplitude, w = cfg.support;
    auto psi = [a, w](double x, double y) {
        const double u = x / w;
        if (std::abs(u) >= 1.0) return 0.0;
        const double b = 1.0 - u * u;
        return a * u * b * b * b * std::sin(std::acos(-1.0) * y);
    };
    const double ta = cfg.theta_amplitude;
    auto theta0 = [w, ta](double x, double y) {
        const double u = x / w, v = (y - 0.5) / 0.35;
        if (std::abs(u) >= 1.0 || std::abs(v) >= 1.0) return 0.0;
        const double bu = 1.0 - u * u, bv = 1.0 - v * v;
        return ta * bu * bu * bu * bv * bv * bv;
    };
    const double h = 1e-6;

    for (double r : cfg.r_list) {
        const int nx = std::max(32, static_cast<int>(cfg.nx_per_unit * r));
        auto dom = make_domain(r, nx, cfg.ny);
        // basis large enough to resolve the bump on every box
        const int mx = std::min(static_cast<int>(12 * r) + 8, (2 * nx - 3) / 3 - 5);
        auto op = assemble_stokes(dom, cfg.params, mx, cfg.my, Sector::Full);
        auto all = eigenpairs(op, std::min(op.basis.dim() / 4, 64));
        int m = 0;
        while (m < static_cast<int>(all.size()) && all[m].lambda <= cfg.lambda_cut) ++m;
        all.resize(std::max(m, 4));

        SimConfig simcfg;
        simcfg.system = SystemKind::Full;
        simcfg.mode = ModeKind::Nonlinear;
        simcfg.dt = cfg.dt;
        simcfg.cfl = cfg.cfl;
        Simulator sim(op, all, profile, simcfg);

        Eigen::MatrixXd U1(dom.nx, dom.ny), U2(dom.nx, dom.ny), TH(dom.nx, dom.ny);
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) {
                const double x = dom.x[i], y = dom.y[j];
                U1(i, j) = (psi(x, y + h) - psi(x, y - h)) / (2.0 * h);
                U2(i, j) = -(psi(x + h, y) - psi(x - h, y)) / (2.0 * h);
                TH(i, j) = theta0(x, y);
            }
        sim.set_velocity(sim.project_velocity(U1, U2));
        sim.set_theta(TH);

        RSweepReport::PerR run;
        run.r = r;
        run.modes = static_cast<int>(all.size());
        const double th0 = sim.diagnostics().theta_l2;
        const long nsteps = static_cast<long>(std::llround(cfg.T / cfg.dt));
        for (long s = 0; s < nsteps; ++s) {
            sim.step();
            auto d = sim.diagnostics();
            run.sup_kinetic = std::max(run.sup_kinetic, d.kinetic);
            run.sup_grad = std::max(run.sup_grad, d.grad_u_sq);
            if (th0 > 0.0)
                run.theta_l2_drift = std::max(run.theta_l2_drift, std::abs(d.theta_l2 - th0) / th0);
            run.bounds_ok = run.bounds_ok && d.energy_bound_ok;
            if (s % 10 == 9 || s + 1 == nsteps) run.series.push_back(d);
        }
        rep.runs.push_back(std::move(run));
    }

    const auto& ref = rep.runs.back();
    for (const auto& run : rep.runs) {
        if (ref.sup_kinetic > 0.0)
            rep.kinetic_spread = std::max(rep.kinetic_spread,
                                          std::abs(run.sup_kinetic - ref.sup_kinetic) / ref.sup_kinetic);
        if (ref.sup_grad > 0.0)
            rep.grad_spread =
                std::max(rep.grad_spread, std::abs(run.sup_grad - ref.sup_grad) / ref.sup_grad);
    }
    return rep;
}

}  // namespace bouss
