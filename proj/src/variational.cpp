#include "bouss/variational.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bouss/cheb.hpp"

namespace bouss {

namespace {

using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

void check_symmetric(const Eigen::MatrixXd& a, const char* what) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) throw std::runtime_error(std::string("pencil assembly not symmetric: ") + what);
}

// One-sided refinement of an extremal eigenpair of (A, B) by inverse
// iteration in extended precision. Removes the cross-coefficient round-off
// floor of the double-precision solve, which matters when high-order
// derivatives of the eigenvector are evaluated afterwards.
void polish_eigenpair(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double& lambda,
                      Eigen::VectorXd& v) {
    const Eigen::Index n = A.rows();
    LongMat Al = A.cast<long double>();
    LongMat Bl = B.cast<long double>();
    LongVec x = v.cast<long double>();
    long double lam = lambda;
    for (int it = 0; it < 3; ++it) {
        LongMat S = Al - lam * Bl;
        Eigen::PartialPivLU<LongMat> lu(S);
        LongVec y = lu.solve(Bl * x);
        long double nrm = std::sqrt((long double)(y.dot(Bl * y)));
        if (!(nrm > 0.0L) || !std::isfinite((double)nrm)) break;
        x = y / nrm;
        lam = x.dot(Al * x) / x.dot(Bl * x);
    }
    if (std::isfinite((double)lam)) {
        lambda = static_cast<double>(lam);
        v = x.cast<double>();
    }
    (void)n;
}

}  // namespace

PhiResult phi(const FormMatrices& fm, double s, bool polish) {
    if (!(s > 0.0)) throw std::invalid_argument("phi: s must be positive");
    Eigen::MatrixXd A = s * (fm.e0 + fm.e1) + fm.e2;
    check_symmetric(A, "s*(e0+e1)+e2");
    check_symmetric(fm.j, "j");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, fm.j);
    if (es.info() != Eigen::Success) throw std::runtime_error("phi: generalized eigensolve failed");
    PhiResult r;
    r.s = s;
    r.xi = fm.xi;
    r.value = es.eigenvalues()(0);
    r.minimizer = es.eigenvectors().col(0);
    if (polish) polish_eigenpair(A, fm.j, r.value, r.minimizer);
    // J-normalization (B-normalized already, renormalize defensively)
    const double jn = r.minimizer.dot(fm.j * r.minimizer);
    if (!(jn > 0.0)) throw std::runtime_error("phi: degenerate minimizer normalization");
    r.minimizer /= std::sqrt(jn);
    // deterministic sign
    Eigen::Index imax;
    r.minimizer.cwiseAbs().maxCoeff(&imax);
    if (r.minimizer(imax) < 0.0) r.minimizer = -r.minimizer;
    return r;
}

LambdaCResult lambda_c(const FormMatrices& fm) {
    Eigen::MatrixXd A = -fm.e2;
    Eigen::MatrixXd B = fm.e0 + fm.e1;
    check_symmetric(A, "-e2");
    check_symmetric(B, "e0+e1");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success) throw std::runtime_error("lambda_c: generalized eigensolve failed");
    LambdaCResult r;
    const Eigen::Index last = es.eigenvalues().size() - 1;
    double lam = es.eigenvalues()(last);
    if (lam > 0.0) {
        Eigen::VectorXd v = es.eigenvectors().col(last);
        polish_eigenpair(A, B, lam, v);
        const double bn = v.dot(B * v);
        v /= std::sqrt(bn);
        r.value = lam;
        r.maximizer = v;
    }
    return r;
}

ElResidual el_residual(const FormMatrices& fm, const PhiResult& pr, const Basis01& basis,
                       const Grid1D& grid, const SteadyProfile& profile) {
    ElResidual out;
    if (!(pr.value < 0.0)) {
        out.applicable = false;
        return out;
    }
    const double s = pr.s;
    const double xi2 = fm.xi * fm.xi;
    const double xi4 = xi2 * xi2;
    const double mu = fm.params.mu;
    const double g = fm.params.g;

    // combined Chebyshev series of the minimizer, with the round-off tail
    // below the resolved band removed before differentiation
    std::size_t len = 0;
    for (const auto& c : basis.coeffs) len = std::max(len, c.size());
    std::vector<double> c(len, 0.0);
    for (int k = 0; k < basis.m; ++k)
        for (std::size_t j = 0; j < basis.coeffs[k].size(); ++j) c[j] += pr.minimizer[k] * basis.coeffs[k][j];
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    std::size_t keep = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (std::abs(c[j]) > 3e-16 * cmax) keep = j + 1;
    c.resize(std::max<std::size_t>(keep, 1));

    std::vector<double> c1 = cheb::derivative(c);
    std::vector<double> c2 = cheb::derivative(c1);
    std::vector<double> c3 = cheb::derivative(c2);
    std::vector<double> c4 = cheb::derivative(c3);

    auto evald = [](const std::vector<double>& cc, double x, double scale) {
        return scale * cheb::eval(cc, 2.0 * x - 1.0);
    };

    double rmax = 0.0, tmax = 0.0, d2max = 0.0;
    for (int i = 1; i + 1 < grid.n; ++i) {
        const double x = grid.nodes[i];
        const double W = evald(c, x, 1.0);
        const double W2 = evald(c2, x, 4.0);
        const double W4 = evald(c4, x, 16.0);
        const double t1 = pr.value * (W2 - xi2 * W);
        const double t2 = s * mu * (W4 - 2.0 * xi2 * W2 + xi4 * W);
        const double t3 = g * xi2 * profile.dtheta(x) * W;
        rmax = std::max(rmax, std::abs(t1 + t2 + t3));
        tmax = std::max({tmax, std::abs(t1), std::abs(t2), std::abs(t3)});
        d2max = std::max(d2max, std::abs(W2));
    }
    out.interior = (tmax > 0.0) ? rmax / tmax : 0.0;

    const double d2_1 = evald(c2, 1.0, 4.0);
    const double d2_0 = evald(c2, 0.0, 4.0);
    const double d1_1 = evald(c1, 1.0, 2.0);
    const double d1_0 = evald(c1, 0.0, 2.0);
    const double nb = std::max(d2max, std::max(std::abs(d2_0), std::abs(d2_1)));
    out.bc_top = std::abs(d2_1 - fm.params.k1 / mu * d1_1) / (nb > 0.0 ? nb : 1.0);
    out.bc_bottom = std::abs(d2_0 + fm.params.k0 / mu * d1_0) / (nb > 0.0 ? nb : 1.0);
    return out;
}

}  // namespace bouss
