#include "bouss/modes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bouss/cheb.hpp"
#include "bouss/quadrature.hpp"

namespace bouss {

namespace {

double eval_series(const std::vector<double>& c, double y, int deriv) {
    std::vector<double> cc = c;
    double scale = 1.0;
    for (int d = 0; d < deriv; ++d) {
        cc = cheb::derivative(cc);
        scale *= 2.0;
    }
    return scale * cheb::eval(cc, 2.0 * y - 1.0);
}

}  // namespace

double Mode::u1(double y, int deriv) const { return eval_series(cu1_, y, deriv); }
double Mode::u2(double y, int deriv) const { return eval_series(cu2_, y, deriv); }
double Mode::varpi(double y, int deriv) const { return eval_series(cvarpi_, y, deriv); }

double Mode::h(double y, int deriv) const {
    const double a = -1.0 / lambda0;
    switch (deriv) {
        case 0: return a * u2(y) * profile_.dtheta(y);
        case 1: return a * (u2(y, 1) * profile_.dtheta(y) + u2(y) * profile_.d2theta(y));
        case 2:
            return a * (u2(y, 2) * profile_.dtheta(y) + 2.0 * u2(y, 1) * profile_.d2theta(y) +
                        u2(y) * profile_.d3theta(y));
        default: throw std::invalid_argument("Mode::h: derivative order must be 0..2");
    }
}

Mode build_mode(const GrowthPoint& gp, const Basis01& basis, const SteadyProfile& profile,
                const PhysicalParams& params) {
    if (!gp.lambda0) throw std::invalid_argument("build_mode: point is stable (no growth rate)");
    Mode m;
    m.xi = gp.xi;
    m.lambda0 = *gp.lambda0;
    m.profile_ = profile;

    // combined Chebyshev series of u2, with the round-off tail removed
    std::size_t len = 0;
    for (const auto& c : basis.coeffs) len = std::max(len, c.size());
    std::vector<double> c(len, 0.0);
    for (int k = 0; k < basis.m; ++k)
        for (std::size_t j = 0; j < basis.coeffs[k].size(); ++j) c[j] += gp.minimizer[k] * basis.coeffs[k][j];
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    std::size_t keep = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (std::abs(c[j]) > 3e-16 * cmax) keep = j + 1;
    c.resize(std::max<std::size_t>(keep, 1));
    m.cu2_ = c;

    // u1 = -u2'/xi (odd under xi -> -xi)
    std::vector<double> d1 = cheb::derivative(c);
    m.cu1_.resize(d1.size());
    for (std::size_t j = 0; j < d1.size(); ++j) m.cu1_[j] = -2.0 * d1[j] / m.xi;

    // varpi = (lambda0 u1 - mu (u1'' - xi^2 u1)) / xi
    std::vector<double> u1d2 = cheb::derivative(cheb::derivative(m.cu1_));
    u1d2.resize(std::max(u1d2.size(), m.cu1_.size()), 0.0);
    std::vector<double> cv(u1d2.size(), 0.0);
    const double xi2 = m.xi * m.xi;
    for (std::size_t j = 0; j < cv.size(); ++j) {
        const double u1j = (j < m.cu1_.size()) ? m.cu1_[j] : 0.0;
        cv[j] = (m.lambda0 * u1j - params.mu * (4.0 * u1d2[j] - xi2 * u1j)) / m.xi;
    }
    m.cvarpi_ = cv;
    return m;
}

double ModeResidual::max_all() const {
    return std::max({momentum_x, momentum_y, transport, divergence, bc_u2, bc_top, bc_bottom});
}

ModeResidual mode_residual(const Mode& m, const Grid1D& grid, const PhysicalParams& params,
                           ThetaAmplitude amp) {
    const double lam = m.lambda0;
    const double xi = m.xi;
    const double xi2 = xi * xi;
    const double mu = params.mu;
    const double g = params.g;

    auto hval = [&](double y) {
        if (amp == ThetaAmplitude::Transport) return m.h(y);
        return -m.u2(y, 1) / lam;
    };

    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    double n1 = 0.0, n2 = 0.0, n3 = 0.0, n4 = 0.0;
    double du1max = 0.0, u2max = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double y = grid.nodes[i];
        const double U1 = m.u1(y), U1d2 = m.u1(y, 2);
        const double U2 = m.u2(y), U2d1 = m.u2(y, 1), U2d2 = m.u2(y, 2);
        const double P = m.varpi(y), Pd1 = m.varpi(y, 1);
        const double H = hval(y);
        const double dth = m.profile().dtheta(y);

        const double a1 = lam * U1, b1 = -xi * P, c1 = -mu * (U1d2 - xi2 * U1);
        r1 = std::max(r1, std::abs(a1 + b1 + c1));
        n1 = std::max({n1, std::abs(a1), std::abs(b1), std::abs(c1)});

        const double a2 = lam * U2, b2 = Pd1, c2 = -mu * (U2d2 - xi2 * U2), d2 = -g * H;
        r2 = std::max(r2, std::abs(a2 + b2 + c2 + d2));
        n2 = std::max({n2, std::abs(a2), std::abs(b2), std::abs(c2), std::abs(d2)});

        const double a3 = lam * H, b3 = U2 * dth;
        r3 = std::max(r3, std::abs(a3 + b3));
        n3 = std::max({n3, std::abs(a3), std::abs(b3)});

        const double a4 = xi * U1, b4 = U2d1;
        r4 = std::max(r4, std::abs(a4 + b4));
        n4 = std::max({n4, std::abs(a4), std::abs(b4)});

        du1max = std::max(du1max, std::abs(m.u1(y, 1)));
        u2max = std::max(u2max, std::abs(U2));
    }

    ModeResidual res;
    res.momentum_x = (n1 > 0.0) ? r1 / n1 : 0.0;
    res.momentum_y = (n2 > 0.0) ? r2 / n2 : 0.0;
    res.transport = (n3 > 0.0) ? r3 / n3 : 0.0;
    res.divergence = (n4 > 0.0) ? r4 / n4 : 0.0;
    res.bc_u2 = (std::abs(m.u2(0.0)) + std::abs(m.u2(1.0))) / (u2max > 0.0 ? u2max : 1.0);
    const double nb = (du1max > 0.0) ? du1max : 1.0;
    res.bc_top = std::abs(m.u1(1.0, 1) - params.k1 / params.mu * m.u1(1.0)) / nb;
    res.bc_bottom = std::abs(m.u1(0.0, 1) + params.k0 / params.mu * m.u1(0.0)) / nb;
    return res;
}

// ---------------------------------------------------------------------------

double SynthBand::operator()(double r) const {
    const double u = (r - center) / halfwidth;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

namespace {

// scalar indicator of the synthesized H^2 content, used only to decide
// quadrature convergence
double norm_indicator(const std::vector<XiQuadMode>& modes, const Grid1D& ygrid) {
    double total = 0.0;
    const double pi = std::acos(-1.0);
    for (const auto& q : modes) {
        const double amp = q.weight * q.f / pi;
        double sum = 0.0;
        for (int i = 0; i < ygrid.n; ++i) {
            const double y = ygrid.nodes[i];
            const double w = ygrid.weights[i];
            for (int b = 0; b <= 2; ++b) {
                const double xa = std::pow(q.xi, 2 * (2 - b));
                sum += w * xa *
                       (q.mode.u1(y, b) * q.mode.u1(y, b) + q.mode.u2(y, b) * q.mode.u2(y, b) +
                        q.mode.varpi(y, b) * q.mode.varpi(y, b) + q.mode.h(y, b) * q.mode.h(y, b));
            }
        }
        total += amp * amp * sum;
    }
    return std::sqrt(total);
}

std::vector<XiQuadMode> build_quad_modes(const Basis01& basis, const Grid1D& grid,
                                         const SteadyProfile& profile, const PhysicalParams& params,
                                         const SynthBand& band, int nq, double tol) {
    auto rule = gauss_legendre(static_cast<std::size_t>(nq), band.center - band.halfwidth,
                               band.center + band.halfwidth);
    std::vector<XiQuadMode> out;
    out.reserve(nq);
    Eigen::VectorXd prev;
    for (int i = 0; i < nq; ++i) {
        XiQuadMode q;
        q.xi = rule.nodes[i];
        q.weight = rule.weights[i];
        q.f = band(q.xi);
        GrowthPoint gp = growth_rate(basis, grid, profile, params, q.xi, tol);
        if (!gp.lambda0)
            throw std::invalid_argument("synthesis_modes: band support not admissible (stable frequency)");
        // align the minimizer sign with the previous node for a smooth integrand
        if (prev.size() == gp.minimizer.size() && prev.dot(gp.minimizer) < 0.0)
            gp.minimizer = -gp.minimizer;
        prev = gp.minimizer;
        q.mode = build_mode(gp, basis, profile, params);
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace

std::vector<XiQuadMode> synthesis_modes(const Basis01& basis, const Grid1D& grid,
                                        const SteadyProfile& profile, const PhysicalParams& params,
                                        const SynthBand& band, int n_quad, double tol) {
    if (!(band.halfwidth > 0.0)) throw std::invalid_argument("synthesis_modes: band halfwidth must be positive");
    if (band.center - band.halfwidth <= 0.0)
        throw std::invalid_argument("synthesis_modes: band must stay at positive frequencies");
    int nq = std::max(n_quad, 33);
    auto modes = build_quad_modes(basis, grid, profile, params, band, nq, tol);
    double ind = norm_indicator(modes, grid);
    for (int round = 0; round < 2; ++round) {
        auto finer = build_quad_modes(basis, grid, profile, params, band, 2 * nq, tol);
        const double ind2 = norm_indicator(finer, grid);
        const bool converged = std::abs(ind2 - ind) <= 1e-8 * std::abs(ind2);
        nq *= 2;
        modes = std::move(finer);
        ind = ind2;
        if (converged) break;
    }
    return modes;
}

void default_x1_rule(const SynthBand& band, double width_mult, Eigen::VectorXd& x1,
                     Eigen::VectorXd& wx1) {
    const double pi = std::acos(-1.0);
    const double L = width_mult * 2.0 * pi / band.halfwidth;
    const double ximax = band.center + band.halfwidth;
    const int n1 = std::max(129, static_cast<int>(4.0 * L * ximax / pi) + 1);
    auto rule = gauss_legendre(static_cast<std::size_t>(n1), -L, L);
    x1 = Eigen::Map<Eigen::VectorXd>(rule.nodes.data(), n1);
    wx1 = Eigen::Map<Eigen::VectorXd>(rule.weights.data(), n1);
}

SynthesizedFields synthesize(const std::vector<XiQuadMode>& modes, const SynthBand& band,
                             const std::vector<double>& times, const Eigen::VectorXd& x1,
                             const Eigen::VectorXd& wx1, const Grid1D& ygrid) {
    if (modes.empty()) throw std::invalid_argument("synthesize: no modes");
    SynthesizedFields sf;
    sf.times = times;
    sf.x1 = x1;
    sf.wx1 = wx1;
    sf.y = ygrid.nodes;
    sf.wy = ygrid.weights;
    sf.band = band;
    sf.lambda_min = modes.front().mode.lambda0;
    sf.lambda_max = sf.lambda_min;
    for (const auto& q : modes) {
        sf.lambda_min = std::min(sf.lambda_min, q.mode.lambda0);
        sf.lambda_max = std::max(sf.lambda_max, q.mode.lambda0);
    }

    const int n1 = static_cast<int>(x1.size());
    const int ny = ygrid.n;
    const double pi = std::acos(-1.0);

    sf.snaps.resize(times.size());
    for (auto& snap : sf.snaps)
        for (int f = 0; f < 4; ++f) {
            for (int i = 0; i <= 2; ++i)
                for (int j = 0; i + j <= 2; ++j) snap.field[f].d[i][j].setZero(n1, ny);
            snap.field[f].dt.setZero(n1, ny);
        }

    for (const auto& q : modes) {
        // y-profiles per field and derivative order
        Eigen::MatrixXd prof[4][3];
        for (int d = 0; d <= 2; ++d)
            for (int f = 0; f < 4; ++f) prof[f][d].resize(1, ny);
        for (int iy = 0; iy < ny; ++iy) {
            const double y = ygrid.nodes[iy];
            for (int d = 0; d <= 2; ++d) {
                prof[0][d](0, iy) = q.mode.u1(y, d);
                prof[1][d](0, iy) = q.mode.u2(y, d);
                prof[2][d](0, iy) = q.mode.varpi(y, d);
                prof[3][d](0, iy) = q.mode.h(y, d);
            }
        }
        // horizontal factors: v1 uses sine, the others cosine
        Eigen::VectorXd sinx(n1), cosx(n1);
        for (int ix = 0; ix < n1; ++ix) {
            sinx[ix] = std::sin(q.xi * x1[ix]);
            cosx[ix] = std::cos(q.xi * x1[ix]);
        }
        auto xfactor = [&](int field, int dx) -> Eigen::VectorXd {
            const bool is_sin = (field == 0);
            const double p = std::pow(q.xi, dx);
            if (is_sin) {
                if (dx == 0) return sinx;
                if (dx == 1) return p * cosx;
                return -p * sinx;
            }
            if (dx == 0) return cosx;
            if (dx == 1) return -p * sinx;
            return -p * cosx;
        };

        for (std::size_t it = 0; it < times.size(); ++it) {
            const double amp = q.weight * q.f / pi * std::exp(q.mode.lambda0 * times[it]);
            for (int f = 0; f < 4; ++f) {
                for (int i = 0; i <= 2; ++i) {
                    Eigen::VectorXd xf = xfactor(f, i);
                    for (int j = 0; i + j <= 2; ++j)
                        sf.snaps[it].field[f].d[i][j].noalias() += amp * xf * prof[f][j];
                }
                sf.snaps[it].field[f].dt.noalias() +=
                    (q.mode.lambda0 * amp) * xfactor(f, 0) * prof[f][0];
            }
        }
    }
    return sf;
}

double hk_norm(const SynthesizedFields& sf, int k, int t_index) {
    if (k < 0 || k > 2) throw std::invalid_argument("hk_norm: k must be 0, 1 or 2");
    double total = 0.0;
    const int n1 = static_cast<int>(sf.x1.size());
    const int ny = static_cast<int>(sf.y.size());
    for (int f = 0; f < 4; ++f) {
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
                const Eigen::MatrixXd& a = sf.at(t_index, f, i, j);
                double s = 0.0;
                for (int ix = 0; ix < n1; ++ix)
                    for (int iy = 0; iy < ny; ++iy) s += sf.wx1[ix] * sf.wy[iy] * a(ix, iy) * a(ix, iy);
                total += s;
            }
    }
    return std::sqrt(total);
}

}  // namespace bouss
