#pragma once

#include <Eigen/Dense>
#include <optional>

#include "bouss/forms.hpp"

namespace bouss {

// Minimum of E(W,s)/J(W) together with the J-normalized minimizer.
struct PhiResult {
    double value = 0.0;
    Eigen::VectorXd minimizer;  // J(minimizer) = 1
    double s = 0.0;
    double xi = 0.0;
};

// Critical threshold: largest eigenvalue of (-e2, e0+e1) when positive.
// Absent when no direction makes -E2 positive (stable profile at this xi).
struct LambdaCResult {
    std::optional<double> value;
    Eigen::VectorXd maximizer;  // normalized so E0+E1 = 1 (when present)
};

struct ElResidual {
    double interior = 0.0;
    double bc_top = 0.0;
    double bc_bottom = 0.0;
    bool applicable = true;  // false when phi >= 0 (no growing-mode identification)
};

// polish=true refines the eigenpair in extended precision; needed when the
// minimizer's high-order derivatives will be evaluated (residual checks,
// mode reconstruction), not for the eigenvalue itself.
PhiResult phi(const FormMatrices& fm, double s, bool polish = true);
LambdaCResult lambda_c(const FormMatrices& fm);

// Pointwise residual of the fourth-order Euler-Lagrange equation and of the
// natural Robin boundary conditions, evaluated for the minimizer produced by
// phi(). The squared rate is identified with -phi (only meaningful when
// phi < 0); for phi >= 0 the record is flagged not-applicable.
ElResidual el_residual(const FormMatrices& fm, const PhiResult& pr, const Basis01& basis,
                       const Grid1D& grid, const SteadyProfile& profile);

}  // namespace bouss
