#include "bouss/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bouss {

GrowthPoint growth_rate(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                        const PhysicalParams& params, double xi, double tol) {
    if (xi == 0.0) throw std::invalid_argument("growth_rate: xi must be nonzero");
    if (!(tol > 0.0)) throw std::invalid_argument("growth_rate: tol must be positive");

    GrowthPoint gp;
    gp.xi = xi;
    FormMatrices fm = assemble_forms(basis, grid, profile, params, std::abs(xi));
    LambdaCResult lc = lambda_c(fm);
    if (!lc.value) return gp;  // stable at this frequency: no bracket exists
    const double lamc = *lc.value;
    gp.lambda_c = lamc;

    auto f = [&](double s) {
        const PhiResult p = phi(fm, s, false);
        const double v = p.value + s * s;
        if (!std::isfinite(v)) throw std::runtime_error("growth_rate: non-finite Phi");
        return v;
    };

    double lo = std::min(tol, lamc * 1e-6);
    double hi = lamc;
    if (!(f(lo) < 0.0) || !(f(hi) > 0.0))
        throw std::runtime_error("growth_rate: bracket endpoints violate sign pattern");
    while (hi - lo > tol * lamc) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double lam0 = 0.5 * (lo + hi);
    gp.lambda0 = lam0;

    const PhiResult pr = phi(fm, lam0);
    gp.phi_at_lambda0 = pr.value;
    gp.minimizer = pr.minimizer;
    const ElResidual er = el_residual(fm, pr, basis, grid, profile);
    gp.el_interior_residual = er.interior;
    gp.bc_residuals = {er.bc_top, er.bc_bottom};
    return gp;
}

GrowthCurve dispersion_curve(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                             const PhysicalParams& params, const std::vector<double>& xi_grid,
                             double tol) {
    if (xi_grid.size() < 3) throw std::invalid_argument("dispersion_curve: need at least 3 xi values");
    for (std::size_t i = 0; i < xi_grid.size(); ++i) {
        if (!(xi_grid[i] > 0.0)) throw std::invalid_argument("dispersion_curve: xi grid must be positive");
        if (i > 0 && !(xi_grid[i] > xi_grid[i - 1]))
            throw std::invalid_argument("dispersion_curve: xi grid must be strictly increasing");
    }
    GrowthCurve curve;
    curve.points.reserve(xi_grid.size());
    for (double xi : xi_grid) curve.points.push_back(growth_rate(basis, grid, profile, params, xi, tol));

    std::size_t best = xi_grid.size();
    double lmax = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        if (p.lambda0 && *p.lambda0 > lmax) {
            lmax = *p.lambda0;
            best = i;
        }
    }
    if (best == xi_grid.size()) {
        curve.all_stable = true;
        curve.capital_lambda = 0.0;
        curve.argmax_xi = 0.0;
        return curve;
    }

    // golden-section refinement of the maximum between the argmax neighbours
    double a = (best > 0) ? xi_grid[best - 1] : xi_grid[best];
    double b = (best + 1 < xi_grid.size()) ? xi_grid[best + 1] : xi_grid[best];
    double xbest = xi_grid[best];
    if (b > a) {
        auto value = [&](double xi) {
            const GrowthPoint p = growth_rate(basis, grid, profile, params, xi, tol);
            return p.lambda0 ? *p.lambda0 : 0.0;
        };
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = value(x1), f2 = value(x2);
        for (int it = 0; it < 40 && (b - a) > 1e-6 * xbest; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = value(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = value(x1);
            }
        }
        const double xm = 0.5 * (a + b);
        const double fm = value(xm);
        if (fm > lmax) {
            lmax = fm;
            xbest = xm;
        }
    }
    curve.capital_lambda = lmax;
    curve.argmax_xi = xbest;
    return curve;
}

double lambda_f(const GrowthCurve& curve, std::pair<double, double> support) {
    const auto& pts = curve.points;
    if (pts.empty()) throw std::invalid_argument("lambda_f: empty curve");
    const double a = support.first, b = support.second;
    if (!(a <= b) || a < pts.front().xi || b > pts.back().xi)
        throw std::invalid_argument("lambda_f: support outside the swept range");

    auto interp = [&](double x) {
        auto it = std::lower_bound(pts.begin(), pts.end(), x,
                                   [](const GrowthPoint& p, double v) { return p.xi < v; });
        if (it == pts.begin()) it = std::next(it);
        const GrowthPoint& hi = *it;
        const GrowthPoint& lo = *std::prev(it);
        if (!lo.lambda0 || !hi.lambda0) throw std::invalid_argument("lambda_f: support not admissible");
        const double t = (x - lo.xi) / (hi.xi - lo.xi);
        return (1.0 - t) * *lo.lambda0 + t * *hi.lambda0;
    };

    double m = std::min(interp(a), interp(b));
    for (const auto& p : pts) {
        if (p.xi < a || p.xi > b) continue;
        if (!p.lambda0) throw std::invalid_argument("lambda_f: support not admissible");
        m = std::min(m, *p.lambda0);
    }
    return m;
}

}  // namespace bouss
