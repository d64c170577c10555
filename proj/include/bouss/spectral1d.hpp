#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace bouss {

// Gauss-Lobatto-Legendre collocation grid on [0,1].
struct Grid1D {
    int n = 0;
    Eigen::VectorXd nodes;    // strictly increasing, nodes[0]=0, nodes[n-1]=1
    Eigen::VectorXd weights;  // positive, sum = 1

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

// Dense collocation differentiation operators on Grid1D nodal values.
struct DiffOps {
    Eigen::MatrixXd d1;
    Eigen::MatrixXd d2;
    Eigen::MatrixXd d4;
};

// Trial basis on [0,1] vanishing at both endpoints (and only there): mapped
// Chebyshev recombinations phi_k = T_k - T_{k+2}. First and second endpoint
// derivatives are unconstrained; boundary conditions of Robin type are left
// to the variational formulation.
struct Basis01 {
    int m = 0;
    // tabulated values at the grid nodes, size n x m
    Eigen::MatrixXd val, d1, d2, d3, d4;
    Eigen::VectorXd dval0;  // phi'(0)
    Eigen::VectorXd dval1;  // phi'(1)
    // Chebyshev coefficients of each basis function (on t in [-1,1], x=(t+1)/2)
    std::vector<std::vector<double>> coeffs;

    // Evaluate a coefficient vector (function in the span) and derivatives at x.
    double eval(const Eigen::VectorXd& w, double x, int deriv = 0) const;
};

Grid1D build_grid(int n);
DiffOps diff_ops(const Grid1D& grid);
Basis01 build_basis(const Grid1D& grid, int m);

// First-derivative collocation matrix on arbitrary distinct nodes
// (barycentric form, diagonal by negative sum).
Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& nodes);

}  // namespace bouss
