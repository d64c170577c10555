#include "bouss/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace bouss {

FormMatrices assemble_forms(const Basis01& basis, const Grid1D& grid, const SteadyProfile& profile,
                            const PhysicalParams& params, double xi) {
    if (xi == 0.0 || !std::isfinite(xi)) throw std::invalid_argument("assemble_forms: xi must be nonzero");
    const int n = grid.n;
    const int m = basis.m;
    if (basis.val.rows() != n) throw std::invalid_argument("assemble_forms: basis/grid mismatch");

    const double xi2 = xi * xi;
    const double xi4 = xi2 * xi2;

    Eigen::VectorXd w = grid.weights;
    Eigen::VectorXd dt(n);
    for (int i = 0; i < n; ++i) dt[i] = profile.dtheta(grid.nodes[i]);

    // weighted Grams: (A^T diag(w .* f) B)
    auto gram = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                    const Eigen::VectorXd& f) -> Eigen::MatrixXd {
        Eigen::MatrixXd Aw = A;
        for (int i = 0; i < n; ++i) Aw.row(i) *= w[i] * f[i];
        Eigen::MatrixXd G = Aw.transpose() * B;
        return 0.5 * (G + G.transpose());
    };
    Eigen::VectorXd one = Eigen::VectorXd::Ones(n);

    FormMatrices fm;
    fm.xi = xi;
    fm.params = params;
    fm.profile_tag = profile.tag();

    fm.e0 = params.mu * (gram(basis.d2, basis.d2, one) + 2.0 * xi2 * gram(basis.d1, basis.d1, one) +
                         xi4 * gram(basis.val, basis.val, one));
    fm.e1 = (-params.k1) * (basis.dval1 * basis.dval1.transpose()) +
            (-params.k0) * (basis.dval0 * basis.dval0.transpose());
    fm.e2 = params.g * xi2 * gram(basis.val, basis.val, dt);
    fm.j = gram(basis.d1, basis.d1, one) + xi2 * gram(basis.val, basis.val, one);
    (void)m;
    return fm;
}

double evaluate_E(const FormMatrices& fm, const Eigen::VectorXd& w, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("evaluate_E: s must be positive");
    return w.dot((s * (fm.e0 + fm.e1) + fm.e2) * w);
}

double evaluate_J(const FormMatrices& fm, const Eigen::VectorXd& w) { return w.dot(fm.j * w); }

}  // namespace bouss
