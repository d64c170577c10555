#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace bouss {
namespace cheb {

// Chebyshev series utilities on the reference interval t in [-1,1].
// A series is a coefficient vector c with f(t) = sum_k c[k] T_k(t).

// Clenshaw evaluation of sum c_k T_k(t).
inline double eval(const std::vector<double>& c, double t) {
    if (c.empty()) return 0.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

// Coefficients of the derivative series: d/dt sum c_k T_k.
inline std::vector<double> derivative(const std::vector<double>& c) {
    const std::size_t n = c.size();
    if (n <= 1) return {0.0};
    std::vector<double> d(n - 1, 0.0);
    // recurrence d_{k-1} = d_{k+1} + 2k c_k, d scaled by 1/2 for k=0
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) {
        w[k - 1] = w[k + 1] + 2.0 * static_cast<double>(k) * c[k];
    }
    for (std::size_t k = 0; k + 1 < n; ++k) d[k] = w[k];
    d[0] *= 0.5;
    return d;
}

// Coefficients of an antiderivative series (constant term left at zero).
// a_k = (c_{k-1} - c_{k+1})/(2k) for k >= 2, a_1 = c_0 - c_2/2.
inline std::vector<double> antiderivative(const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<double> a(n + 1, 0.0);
    if (n == 0) return a;
    for (std::size_t k = 2; k <= n; ++k) {
        const double cm = c[k - 1];
        const double cp = (k + 1 < n) ? c[k + 1] : 0.0;
        a[k] = (cm - cp) / (2.0 * static_cast<double>(k));
    }
    a[1] = c[0] - ((n > 2) ? 0.5 * c[2] : 0.0);
    return a;
}

// Interpolate samples f(t_j) on the n+1 Chebyshev-Gauss-Lobatto points
// t_j = cos(pi j / n) into a coefficient vector (DCT-I, direct O(n^2)).
inline std::vector<double> interpolate_cgl(const std::vector<double>& f) {
    const std::size_t np = f.size();
    const std::size_t n = np - 1;
    std::vector<double> c(np, 0.0);
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 : 1.0;
            s += w * f[j] * std::cos(pi * static_cast<double>(k * j) / static_cast<double>(n));
        }
        c[k] = 2.0 * s / static_cast<double>(n);
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return c;
}

// Chebyshev-Gauss-Lobatto points cos(pi j/n), j=0..n (descending from 1 to -1).
inline std::vector<double> cgl_points(std::size_t n) {
    std::vector<double> t(n + 1);
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j <= n; ++j) t[j] = std::cos(pi * static_cast<double>(j) / static_cast<double>(n));
    return t;
}

}  // namespace cheb

// A polynomial on [a,b] stored as a Chebyshev series in the mapped variable.
class ChebPoly {
  public:
    ChebPoly() = default;
    ChebPoly(std::vector<double> coeffs, double a, double b) : c_(std::move(coeffs)), a_(a), b_(b) {}

    // Build from a callable sampled at n+1 CGL points.
    template <class F>
    static ChebPoly fit(F&& f, double a, double b, std::size_t n) {
        auto t = cheb::cgl_points(n);
        std::vector<double> v(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * t[j];
            v[j] = f(x);
        }
        return ChebPoly(cheb::interpolate_cgl(v), a, b);
    }

    double operator()(double x) const {
        const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
        return cheb::eval(c_, t);
    }

    ChebPoly derivative() const {
        ChebPoly d(cheb::derivative(c_), a_, b_);
        const double s = 2.0 / (b_ - a_);
        for (auto& v : d.c_) v *= s;
        return d;
    }

    // Antiderivative vanishing at x=a.
    ChebPoly antiderivative() const {
        ChebPoly p(cheb::antiderivative(c_), a_, b_);
        const double s = 0.5 * (b_ - a_);
        for (auto& v : p.c_) v *= s;
        p.c_[0] -= p(a_);
        return p;
    }

    const std::vector<double>& coeffs() const { return c_; }
    double a() const { return a_; }
    double b() const { return b_; }

  private:
    std::vector<double> c_;
    double a_ = -1.0, b_ = 1.0;
};

}  // namespace bouss
