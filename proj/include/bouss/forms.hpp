#pragma once

#include <Eigen/Dense>
#include <string>

#include "bouss/profiles.hpp"
#include "bouss/spectral1d.hpp"

namespace bouss {

// Discrete symmetric bilinear forms of the reduced one-dimensional problem at
// a fixed horizontal frequency xi:
//   e0: mu * int |W''|^2 + 2 xi^2 |W'|^2 + xi^4 W^2
//   e1: -k1 W'(1)^2 - k0 W'(0)^2              (rank <= 2, PSD for k <= 0)
//   e2: g xi^2 int dtheta W^2
//   j : int |W'|^2 + xi^2 W^2
struct FormMatrices {
    Eigen::MatrixXd e0, e1, e2, j;
    double xi = 0.0;
    PhysicalParams params{1.0, 1.0, 0.0, 0.0};
    std::string profile_tag;
};

FormMatrices assemble_forms(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                            const PhysicalParams& params, double xi);

// w' (s e0 + s e1 + e2) w for s > 0
double evaluate_E(const FormMatrices& fm, const Eigen::VectorXd& w, double s);

// w' j w
double evaluate_J(const FormMatrices& fm, const Eigen::VectorXd& w);

}  // namespace bouss
