#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "bouss/variational.hpp"

namespace bouss {

// One sample of the growth-rate relation at frequency xi: the growth rate
// lambda0 solves  -lambda0^2 = Phi(lambda0, xi)  when the profile is unstable
// at this frequency, and is absent otherwise.
struct GrowthPoint {
    double xi = 0.0;
    std::optional<double> lambda0;
    std::optional<double> lambda_c;
    double phi_at_lambda0 = 0.0;
    double el_interior_residual = 0.0;
    std::pair<double, double> bc_residuals{0.0, 0.0};  // (top, bottom)
    Eigen::VectorXd minimizer;                         // J-normalized
};

struct GrowthCurve {
    std::vector<GrowthPoint> points;      // ordered by xi
    double capital_lambda = 0.0;          // max growth rate over the sweep
    double argmax_xi = 0.0;
    bool all_stable = false;
};

GrowthPoint growth_rate(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                        const PhysicalParams& params, double xi, double tol = 1e-10);

GrowthCurve dispersion_curve(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                             const PhysicalParams& params, const std::vector<double>& xi_grid,
                             double tol = 1e-10);

// Infimum of lambda0 over [support.first, support.second], from grid samples
// with linear interpolation at the interval endpoints. Throws if the support
// reaches outside the swept range or touches a stable sample.
double lambda_f(const GrowthCurve& curve, std::pair<double, double> support);

}  // namespace bouss
