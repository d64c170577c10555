#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bouss/profiles.hpp"
#include "bouss/spectral1d.hpp"

namespace bouss {

// Rectangle [-r, r] x [0, 1] with Gauss-Lobatto nodes in both directions.
struct RectDomain {
    double r = 1.0;
    int nx = 0, ny = 0;
    Eigen::VectorXd x, wx;  // horizontal nodes and quadrature weights
    Eigen::VectorXd y, wy;  // vertical nodes and quadrature weights
};

RectDomain make_domain(double r, int nx, int ny);

// Horizontal symmetry sector of the stream-function basis. The wall slip
// experiments live entirely in the odd sector (vertical velocity even in x),
// which is an invariant subspace of the dynamics.
enum class Sector { Full, Odd, Even };

// Divergence-free velocity basis from a tensor stream function: clamped
// recombined Chebyshev polynomials in x (no-slip side walls) times the shared
// pinned basis in y (impermeable top/bottom; slip conditions are natural).
struct StreamBasis {
    RectDomain dom;
    Sector sector = Sector::Full;
    int mx = 0, my = 0;
    // tabulated 1D factors at the domain nodes, orders 0..3
    Eigen::MatrixXd Xd[4];  // nx x mx
    Eigen::MatrixXd Yd[4];  // ny x my
    int dim() const { return mx * my; }
};

// Discrete pencil (A, M): A is the viscous energy form with wall-slip trace
// terms, M the velocity mass form, both on the stream-function coefficients.
struct StokesOperator {
    StreamBasis basis;
    PhysicalParams params{1.0, 1.0, 0.0, 0.0};
    Eigen::MatrixXd A, M;
};

StokesOperator assemble_stokes(const RectDomain& dom, const PhysicalParams& params, int mx, int my,
                               Sector sector = Sector::Full);

struct StokesEigenpair {
    double lambda = 0.0;
    Eigen::MatrixXd coeffs;  // mx x my stream-function coefficients
    Eigen::MatrixXd e1, e2;  // velocity components at the domain nodes (nx x ny)
    Eigen::MatrixXd p;       // pressure (zero mean) at the domain nodes
};

// First m eigenpairs sorted ascending; velocities L2-orthonormal (eigenvalue
// clusters come out jointly orthonormalized by the dense solve).
std::vector<StokesEigenpair> eigenpairs(const StokesOperator& op, int m);

// Sampled x-derivative (dx) and y-derivative (dy) fields of a pair.
Eigen::MatrixXd mode_field(const StokesOperator& op, const StokesEigenpair& ep, int component,
                           int dx, int dy);

struct StokesChecks {
    double l2_orthogonality_defect = 0.0;     // max |(e_i, e_j) - delta_ij|
    double energy_orthogonality_defect = 0.0; // max rel |((e_i, e_j)) - lambda_i delta_ij|
    double max_divergence = 0.0;              // collocation divergence / grad norm
    double bc_walls = 0.0;                    // |e2| at top/bottom over max |e|
    double bc_sides = 0.0;                    // |e| at side walls over max |e|
    double bc_navier_top = 0.0;               // |d2 e1 - (k1/mu) e1| at the top, relative
    double bc_navier_bottom = 0.0;
    double c_l4 = 0.0;                        // max ||e||_L4^2 / (||e||_L2 ||grad e||_L2)
    double c_linf = 0.0;                      // max ||e||_Linf^2 / (||e||_L2 ||e||_H2)
    std::vector<int> bc_outliers;             // pairs whose bc residual exceeds 10x the median
};

StokesChecks basis_checks(const StokesOperator& op, const std::vector<StokesEigenpair>& pairs);

}  // namespace bouss
