#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bouss {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Legendre P_n(t) and its derivative by the three-term recurrence.
inline void legendre(int n, double t, double& p, double& dp) {
    double p0 = 1.0, p1 = t;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (t * p1 - p0) / (t * t - 1.0);
}

}  // namespace detail

// n-point Gauss-Legendre rule on [a,b]; exact for polynomials up to degree 2n-1.
inline QuadRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    QuadRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = std::acos(-1.0);
    const int ni = static_cast<int>(n);
    for (int i = 0; i < ni; ++i) {
        // Newton from the Chebyshev-based initial guess
        double t = std::cos(pi * (i + 0.75) / (ni + 0.5));
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            detail::legendre(ni, t, p, dp);
            const double dt = -p / dp;
            t += dt;
            if (std::abs(dt) < 1e-15) break;
        }
        detail::legendre(ni, t, p, dp);
        q.nodes[ni - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        q.weights[ni - 1 - i] = (b - a) / ((1.0 - t * t) * dp * dp);
    }
    return q;
}

// n-point Gauss-Lobatto-Legendre rule on [a,b] (endpoints included);
// exact for polynomials up to degree 2n-3.
inline QuadRule gauss_lobatto(std::size_t n, double a = -1.0, double b = 1.0) {
    if (n < 2) throw std::invalid_argument("gauss_lobatto: n >= 2 required");
    QuadRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const int ni = static_cast<int>(n);
    const int m = ni - 1;
    const double pi = std::acos(-1.0);
    std::vector<double> t(n);
    t[0] = -1.0;
    t[n - 1] = 1.0;
    // interior nodes: roots of P'_{n-1}, Newton with CGL initial guesses
    for (int i = 1; i < m; ++i) {
        double x = -std::cos(pi * i / m);
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            detail::legendre(m, x, p, dp);
            // second derivative from the Legendre ODE: (1-x^2)P'' = 2xP' - m(m+1)P
            const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
            const double dx = -dp / d2p;
            x += dx;
            if (std::abs(dx) < 1e-15) break;
        }
        t[i] = x;
    }
    for (int i = 0; i < ni; ++i) {
        double p, dp;
        detail::legendre(m, t[i], p, dp);
        const double w = 2.0 / (m * (m + 1.0) * p * p);
        q.nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * t[i];
        q.weights[i] = 0.5 * (b - a) * w;
    }
    return q;
}

}  // namespace bouss
