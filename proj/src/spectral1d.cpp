#include "bouss/spectral1d.hpp"

#include <cmath>
#include <stdexcept>

#include "bouss/cheb.hpp"
#include "bouss/quadrature.hpp"

namespace bouss {

Grid1D build_grid(int n) {
    if (n < 8) throw std::invalid_argument("build_grid: n >= 8 required");
    auto q = gauss_lobatto(static_cast<std::size_t>(n), 0.0, 1.0);
    Grid1D g;
    g.n = n;
    g.nodes = Eigen::Map<Eigen::VectorXd>(q.nodes.data(), n);
    g.weights = Eigen::Map<Eigen::VectorXd>(q.weights.data(), n);
    return g;
}

Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& nodes) {
    const int n = static_cast<int>(nodes.size());
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            p *= (nodes[i] - nodes[j]);
        }
        w[i] = 1.0 / p;
    }
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            d1(i, j) = (w[j] / w[i]) / (nodes[i] - nodes[j]);
            diag -= d1(i, j);
        }
        d1(i, i) = diag;  // negative-sum trick
    }
    return d1;
}

DiffOps diff_ops(const Grid1D& grid) {
    DiffOps ops;
    ops.d1 = diff_matrix(grid.nodes);
    auto nst = [](Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < m.cols(); ++j)
                if (j != i) s += m(i, j);
            m(i, i) = -s;
        }
    };
    ops.d2 = ops.d1 * ops.d1;
    nst(ops.d2);
    ops.d4 = ops.d2 * ops.d2;
    nst(ops.d4);
    return ops;
}

double Basis01::eval(const Eigen::VectorXd& w, double x, int deriv) const {
    // combine coefficient vectors, then differentiate the series
    std::size_t len = 0;
    for (const auto& c : coeffs) len = std::max(len, c.size());
    std::vector<double> acc(len, 0.0);
    for (int k = 0; k < m; ++k)
        for (std::size_t j = 0; j < coeffs[k].size(); ++j) acc[j] += w[k] * coeffs[k][j];
    double scale = 1.0;
    for (int d = 0; d < deriv; ++d) {
        acc = cheb::derivative(acc);
        scale *= 2.0;  // x = (t+1)/2
    }
    return scale * cheb::eval(acc, 2.0 * x - 1.0);
}

Basis01 build_basis(const Grid1D& grid, int m) {
    const int n = grid.n;
    if (m < 4 || m > n - 4) throw std::invalid_argument("build_basis: need 4 <= m <= n-4");
    Basis01 b;
    b.m = m;
    b.val.setZero(n, m);
    b.d1.setZero(n, m);
    b.d2.setZero(n, m);
    b.d3.setZero(n, m);
    b.d4.setZero(n, m);
    b.dval0.setZero(m);
    b.dval1.setZero(m);
    b.coeffs.resize(m);
    for (int k = 0; k < m; ++k) {
        std::vector<double> c(k + 3, 0.0);
        c[k] = 1.0;
        c[k + 2] = -1.0;
        b.coeffs[k] = c;
        std::vector<double> d1c = cheb::derivative(c);
        std::vector<double> d2c = cheb::derivative(d1c);
        std::vector<double> d3c = cheb::derivative(d2c);
        std::vector<double> d4c = cheb::derivative(d3c);
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * grid.nodes[i] - 1.0;
            b.val(i, k) = cheb::eval(c, t);
            b.d1(i, k) = 2.0 * cheb::eval(d1c, t);
            b.d2(i, k) = 4.0 * cheb::eval(d2c, t);
            b.d3(i, k) = 8.0 * cheb::eval(d3c, t);
            b.d4(i, k) = 16.0 * cheb::eval(d4c, t);
        }
        b.dval0[k] = 2.0 * cheb::eval(d1c, -1.0);
        b.dval1[k] = 2.0 * cheb::eval(d1c, 1.0);
    }
    return b;
}

}  // namespace bouss
