#include "bouss/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace bouss {

PhysicalParams::PhysicalParams(double mu_, double g_, double k0_, double k1_)
    : mu(mu_), g(g_), k0(k0_), k1(k1_) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("PhysicalParams: mu must be positive");
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("PhysicalParams: g must be positive");
    if (!(k0 <= 0.0) || !std::isfinite(k0))
        throw std::invalid_argument("PhysicalParams: slip coefficients must be non-positive (k0)");
    if (!(k1 <= 0.0) || !std::isfinite(k1))
        throw std::invalid_argument("PhysicalParams: slip coefficients must be non-positive (k1)");
}

namespace {

// Natural cubic spline with not-a-knot end conditions.
class CubicSpline {
  public:
    CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 4) throw std::invalid_argument("table profile needs at least 4 samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("table profile abscissae must be strictly increasing");
        for (double v : y_)
            if (!std::isfinite(v)) throw std::invalid_argument("table profile contains non-finite samples");
        if (x_.front() > 1e-12 || x_.back() < 1.0 - 1e-12)
            throw std::invalid_argument("table profile must cover [0,1]");
        build();
    }

    double eval(double t, int deriv) const {
        const std::size_t i = interval(t);
        const double h = t - x_[i];
        switch (deriv) {
            case 0: return ((d_[i] * h + c_[i]) * h + b_[i]) * h + y_[i];
            case 1: return (3.0 * d_[i] * h + 2.0 * c_[i]) * h + b_[i];
            case 2: return 6.0 * d_[i] * h + 2.0 * c_[i];
            default: return 6.0 * d_[i];
        }
    }

  private:
    std::size_t interval(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        return i;
    }

    void build() {
        const std::size_t n = x_.size();
        const std::size_t m = n - 1;
        std::vector<double> h(m);
        for (std::size_t i = 0; i < m; ++i) h[i] = x_[i + 1] - x_[i];
        // solve for second derivatives sigma with not-a-knot conditions
        std::vector<double> a(n, 0.0), bdiag(n, 0.0), cdiag(n, 0.0), rhs(n, 0.0);
        bdiag[0] = h[1];
        cdiag[0] = -(h[0] + h[1]);
        rhs[0] = 0.0;
        // third row entry handled by elimination below (pentadiagonal-free trick)
        for (std::size_t i = 1; i < m; ++i) {
            a[i] = h[i - 1];
            bdiag[i] = 2.0 * (h[i - 1] + h[i]);
            cdiag[i] = h[i];
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }
        a[n - 1] = -(h[m - 2] + h[m - 1]);
        bdiag[n - 1] = h[m - 2];
        rhs[n - 1] = 0.0;
        // not-a-knot couples rows 0 and n-1 to their third neighbours; fold in
        std::vector<double> extra0(n, 0.0), extraN(n, 0.0);
        extra0[2] = h[0];
        extraN[n - 3] = h[m - 1];
        // Gaussian elimination on the small banded-plus-spikes system
        std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) M[i][i - 1] = a[i];
            M[i][i] = bdiag[i];
            if (i + 1 < n) M[i][i + 1] = cdiag[i];
        }
        M[0][2] += extra0[2];
        M[n - 1][n - 3] += extraN[n - 3];
        sigma_.assign(n, 0.0);
        // dense partial-pivot solve (n is small for table profiles)
        std::vector<double> r = rhs;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t row = col + 1; row < n; ++row)
                if (std::abs(M[row][col]) > std::abs(M[piv][col])) piv = row;
            std::swap(M[piv], M[col]);
            std::swap(r[piv], r[col]);
            if (M[col][col] == 0.0) throw std::runtime_error("table profile: singular spline system");
            for (std::size_t row = col + 1; row < n; ++row) {
                const double f = M[row][col] / M[col][col];
                if (f == 0.0) continue;
                for (std::size_t k = col; k < n; ++k) M[row][k] -= f * M[col][k];
                r[row] -= f * r[col];
            }
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = r[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= M[i][k] * sigma_[k];
            sigma_[i] = s / M[i][i];
        }
        b_.resize(m);
        c_.resize(m);
        d_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            c_[i] = 0.5 * sigma_[i];
            d_[i] = (sigma_[i + 1] - sigma_[i]) / (6.0 * h[i]);
            b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * sigma_[i] + sigma_[i + 1]) / 6.0;
        }
    }

    std::vector<double> x_, y_, b_, c_, d_, sigma_;
};

constexpr std::size_t kFineSamples = 1025;

}  // namespace

SteadyProfile SteadyProfile::make(const ProfileSpec& spec) {
    SteadyProfile p;

    if (std::holds_alternative<LinearProfile>(spec)) {
        const double beta = std::get<LinearProfile>(spec).beta;
        if (!std::isfinite(beta)) throw std::invalid_argument("linear profile: non-finite slope");
        p.theta_ = [beta](double x) { return beta * x; };
        p.dtheta_ = [beta](double) { return beta; };
        p.d2theta_ = [](double) { return 0.0; };
        p.d3theta_ = [](double) { return 0.0; };
        p.p_ = [beta](double x) { return 0.5 * beta * x * x; };
        p.tag_ = "linear(beta=" + std::to_string(beta) + ")";
        p.smoothness_ = 8;
    } else if (std::holds_alternative<TanhLayerProfile>(spec)) {
        const auto t = std::get<TanhLayerProfile>(spec);
        if (!(t.width > 0.0)) throw std::invalid_argument("tanh profile: width must be positive");
        if (!(t.center > 0.0 && t.center < 1.0))
            throw std::invalid_argument("tanh profile: center must lie in (0,1)");
        const double c = t.center, w = t.width, dj = t.jump;
        p.theta_ = [c, w, dj](double x) { return 0.5 * dj * std::tanh((x - c) / w); };
        p.dtheta_ = [c, w, dj](double x) {
            const double s = 1.0 / std::cosh((x - c) / w);
            return 0.5 * dj / w * s * s;
        };
        p.d2theta_ = [c, w, dj](double x) {
            const double u = (x - c) / w;
            const double s = 1.0 / std::cosh(u);
            return -dj / (w * w) * s * s * std::tanh(u);
        };
        p.d3theta_ = [c, w, dj](double x) {
            const double u = (x - c) / w;
            const double s2 = 1.0 / (std::cosh(u) * std::cosh(u));
            const double th = std::tanh(u);
            return dj / (w * w * w) * s2 * (2.0 * th * th - s2);
        };
        p.p_ = [c, w, dj](double x) {
            return 0.5 * dj * w * (std::log(std::cosh((x - c) / w)) - std::log(std::cosh(c / w)));
        };
        p.tag_ = "tanh(center=" + std::to_string(c) + ",width=" + std::to_string(w) +
                 ",jump=" + std::to_string(dj) + ")";
        p.smoothness_ = 8;
    } else {
        const auto& tb = std::get<TableProfile>(spec);
        if (tb.x.size() != tb.value.size()) throw std::invalid_argument("table profile: size mismatch");
        for (double v : tb.x)
            if (!std::isfinite(v)) throw std::invalid_argument("table profile contains non-finite samples");
        auto spl = std::make_shared<CubicSpline>(tb.x, tb.value);
        p.theta_ = [spl](double x) { return spl->eval(x, 0); };
        p.dtheta_ = [spl](double x) { return spl->eval(x, 1); };
        p.d2theta_ = [spl](double x) { return spl->eval(x, 2); };
        p.d3theta_ = [spl](double x) { return spl->eval(x, 3); };
        // antiderivative via a Chebyshev fit of the spline
        auto fit = ChebPoly::fit([spl](double x) { return spl->eval(x, 0); }, 0.0, 1.0, 256);
        auto anti = fit.antiderivative();
        p.p_ = [anti](double x) { return anti(x); };
        p.tag_ = "table(" + std::to_string(tb.x.size()) + " samples)";
        p.smoothness_ = 2;
    }

    p.sx_.resize(kFineSamples);
    p.st_.resize(kFineSamples);
    p.sdt_.resize(kFineSamples);
    p.sp_.resize(kFineSamples);
    double m = 0.0;
    for (std::size_t i = 0; i < kFineSamples; ++i) {
        const double x = static_cast<double>(i) / (kFineSamples - 1);
        p.sx_[i] = x;
        p.st_[i] = p.theta_(x);
        p.sdt_[i] = p.dtheta_(x);
        p.sp_[i] = p.p_(x);
        m = std::max(m, std::abs(p.sdt_[i]));
    }
    p.max_abs_dtheta_ = m;
    return p;
}

SteadyProfile make_profile(const ProfileSpec& spec) { return SteadyProfile::make(spec); }

std::vector<std::pair<double, double>> rt_unstable_region(const SteadyProfile& profile, double tol) {
    if (tol < 0.0) throw std::invalid_argument("rt_unstable_region: tol must be non-negative");
    const std::size_t n = 4096;
    auto below = [&](double x) { return profile.dtheta(x) < -tol; };
    auto refine = [&](double lo, double hi) {
        // sign change of (dtheta + tol) in [lo,hi]
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (below(mid) == below(lo))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<std::pair<double, double>> out;
    double start = 0.0;
    bool inside = false;
    double prev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        const bool b = below(x);
        if (b && !inside) {
            start = (i == 0) ? 0.0 : refine(prev, x);
            inside = true;
        } else if (!b && inside) {
            out.emplace_back(start, refine(prev, x));
            inside = false;
        }
        prev = x;
    }
    if (inside) out.emplace_back(start, 1.0);
    return out;
}

std::vector<double> steady_pressure(const SteadyProfile& profile, const PhysicalParams& params,
                                    const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = params.g * profile.theta_antiderivative(x[i]);
    return out;
}

}  // namespace bouss
