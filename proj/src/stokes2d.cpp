#include "bouss/stokes2d.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bouss/cheb.hpp"
#include "bouss/quadrature.hpp"

namespace bouss {

RectDomain make_domain(double r, int nx, int ny) {
    if (!(r > 0.0)) throw std::invalid_argument("make_domain: r must be positive");
    if (nx < 16 || ny < 16) throw std::invalid_argument("make_domain: nx, ny >= 16 required");
    RectDomain d;
    d.r = r;
    d.nx = nx;
    d.ny = ny;
    auto qx = gauss_lobatto(static_cast<std::size_t>(nx), -r, r);
    auto qy = gauss_lobatto(static_cast<std::size_t>(ny), 0.0, 1.0);
    d.x = Eigen::Map<Eigen::VectorXd>(qx.nodes.data(), nx);
    d.wx = Eigen::Map<Eigen::VectorXd>(qx.weights.data(), nx);
    d.y = Eigen::Map<Eigen::VectorXd>(qy.nodes.data(), ny);
    d.wy = Eigen::Map<Eigen::VectorXd>(qy.weights.data(), ny);
    return d;
}

namespace {

// clamped recombination: vanishes with its first derivative at both ends
std::vector<double> clamped_coeffs(int k) {
    std::vector<double> c(k + 5, 0.0);
    c[k] = 1.0;
    c[k + 2] = -2.0 * (k + 2.0) / (k + 3.0);
    c[k + 4] = (k + 1.0) / (k + 3.0);
    return c;
}

// pinned recombination: vanishes at both ends, free derivatives
std::vector<double> pinned_coeffs(int k) {
    std::vector<double> c(k + 3, 0.0);
    c[k] = 1.0;
    c[k + 2] = -1.0;
    return c;
}

void tabulate(const std::vector<std::vector<double>>& coeffs, const Eigen::VectorXd& nodes,
              double a, double b, Eigen::MatrixXd out[4]) {
    const int n = static_cast<int>(nodes.size());
    const int m = static_cast<int>(coeffs.size());
    const double scale = 2.0 / (b - a);
    for (int d = 0; d < 4; ++d) out[d].setZero(n, m);
    for (int k = 0; k < m; ++k) {
        std::vector<double> c = coeffs[k];
        double s = 1.0;
        for (int d = 0; d < 4; ++d) {
            for (int i = 0; i < n; ++i) {
                const double t = (2.0 * nodes[i] - (a + b)) / (b - a);
                out[d](i, k) = s * cheb::eval(c, t);
            }
            c = cheb::derivative(c);
            s *= scale;
        }
    }
}

// weighted Gram of tabulated columns: G = A^T diag(w) B
Eigen::MatrixXd gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& w) {
    Eigen::MatrixXd Aw = A;
    for (int i = 0; i < A.rows(); ++i) Aw.row(i) *= w[i];
    Eigen::MatrixXd G = Aw.transpose() * B;
    return 0.5 * (G + G.transpose());
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace

StokesOperator assemble_stokes(const RectDomain& dom, const PhysicalParams& params, int mx, int my,
                               Sector sector) {
    if (mx < 2 || my < 2) throw std::invalid_argument("assemble_stokes: mx, my >= 2 required");
    StokesOperator op;
    op.params = params;
    op.basis.dom = dom;
    op.basis.sector = sector;
    op.basis.mx = mx;
    op.basis.my = my;

    std::vector<std::vector<double>> xc;
    for (int k = 0; xc.size() < static_cast<std::size_t>(mx); ++k) {
        if (sector == Sector::Odd && k % 2 == 0) continue;
        if (sector == Sector::Even && k % 2 == 1) continue;
        xc.push_back(clamped_coeffs(k));
    }
    std::vector<std::vector<double>> yc;
    for (int k = 0; k < my; ++k) yc.push_back(pinned_coeffs(k));

    // quadrature must integrate products of basis derivatives exactly
    const int degx = static_cast<int>(xc.size()) * ((sector == Sector::Full) ? 1 : 2) + 5;
    if (2 * dom.nx - 3 < 2 * degx)
        throw std::invalid_argument("assemble_stokes: nx too small for the requested mx");
    const int degy = my + 2;
    if (2 * dom.ny - 3 < 2 * degy)
        throw std::invalid_argument("assemble_stokes: ny too small for the requested my");

    tabulate(xc, dom.x, -dom.r, dom.r, op.basis.Xd);
    tabulate(yc, dom.y, 0.0, 1.0, op.basis.Yd);

    const Eigen::MatrixXd M0x = gram(op.basis.Xd[0], op.basis.Xd[0], dom.wx);
    const Eigen::MatrixXd S1x = gram(op.basis.Xd[1], op.basis.Xd[1], dom.wx);
    const Eigen::MatrixXd S2x = gram(op.basis.Xd[2], op.basis.Xd[2], dom.wx);
    const Eigen::MatrixXd M0y = gram(op.basis.Yd[0], op.basis.Yd[0], dom.wy);
    const Eigen::MatrixXd S1y = gram(op.basis.Yd[1], op.basis.Yd[1], dom.wy);
    const Eigen::MatrixXd S2y = gram(op.basis.Yd[2], op.basis.Yd[2], dom.wy);

    // wall traces of u1 = d_y psi at y=0 and y=1
    const int ny = dom.ny;
    Eigen::VectorXd Yp0 = op.basis.Yd[1].row(0).transpose();
    Eigen::VectorXd Yp1 = op.basis.Yd[1].row(ny - 1).transpose();

    op.A = params.mu * (kron(S2x, M0y) + 2.0 * kron(S1x, S1y) + kron(M0x, S2y)) +
           (-params.k1) * kron(M0x, Eigen::MatrixXd(Yp1 * Yp1.transpose())) +
           (-params.k0) * kron(M0x, Eigen::MatrixXd(Yp0 * Yp0.transpose()));
    op.M = kron(S1x, M0y) + kron(M0x, S1y);
    return op;
}

std::vector<StokesEigenpair> eigenpairs(const StokesOperator& op, int m) {
    const int dim = op.basis.dim();
    if (m < 1 || 4 * m > dim)
        throw std::invalid_argument("eigenpairs: need 1 <= m <= dim/4 (raise mx/my)");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A, op.M);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenpairs: eigensolver failed");

    const int mx = op.basis.mx, my = op.basis.my;
    std::vector<StokesEigenpair> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) {
        StokesEigenpair ep;
        ep.lambda = es.eigenvalues()(i);
        Eigen::VectorXd v = es.eigenvectors().col(i);
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        ep.coeffs = Eigen::Map<Eigen::MatrixXd>(v.data(), my, mx).transpose();
        out.push_back(std::move(ep));
    }
    // sample velocities; renormalize in the quadrature L2 inner product
    for (auto& ep : out) {
        ep.e1 = op.basis.Xd[0] * ep.coeffs * op.basis.Yd[1].transpose();
        ep.e2 = -(op.basis.Xd[1] * ep.coeffs * op.basis.Yd[0].transpose());
        double n2 = 0.0;
        for (int i = 0; i < op.basis.dom.nx; ++i)
            for (int j = 0; j < op.basis.dom.ny; ++j)
                n2 += op.basis.dom.wx[i] * op.basis.dom.wy[j] *
                      (ep.e1(i, j) * ep.e1(i, j) + ep.e2(i, j) * ep.e2(i, j));
        const double s = 1.0 / std::sqrt(n2);
        ep.coeffs *= s;
        ep.e1 *= s;
        ep.e2 *= s;
    }

    // pressure recovery: least-squares potential of lambda e + mu lap e on a
    // Chebyshev tensor space, zero-mean gauge
    const RectDomain& dom = op.basis.dom;
    const int px = std::min(mx + 4, dom.nx - 4), py = std::min(my + 4, dom.ny - 4);
    std::vector<std::vector<double>> pxc, pyc;
    for (int k = 0; k < px; ++k) {
        std::vector<double> c(k + 1, 0.0);
        c[k] = 1.0;
        pxc.push_back(c);
    }
    for (int k = 0; k < py; ++k) {
        std::vector<double> c(k + 1, 0.0);
        c[k] = 1.0;
        pyc.push_back(c);
    }
    Eigen::MatrixXd Px[4], Py[4];
    tabulate(pxc, dom.x, -dom.r, dom.r, Px);
    tabulate(pyc, dom.y, 0.0, 1.0, Py);
    const Eigen::MatrixXd pM0x = gram(Px[0], Px[0], dom.wx);
    const Eigen::MatrixXd pS1x = gram(Px[1], Px[1], dom.wx);
    const Eigen::MatrixXd pM0y = gram(Py[0], Py[0], dom.wy);
    const Eigen::MatrixXd pS1y = gram(Py[1], Py[1], dom.wy);
    Eigen::MatrixXd N = kron(pS1x, pM0y) + kron(pM0x, pS1y);
    // drop the constant direction (index 0,0)
    const int pdim = px * py;
    Eigen::MatrixXd Nr = N.block(1, 1, pdim - 1, pdim - 1);
    Eigen::LDLT<Eigen::MatrixXd> solver(Nr);

    for (auto& ep : out) {
        const Eigen::MatrixXd lap1 = op.basis.Xd[2] * ep.coeffs * op.basis.Yd[1].transpose() +
                                     op.basis.Xd[0] * ep.coeffs * op.basis.Yd[3].transpose();
        const Eigen::MatrixXd lap2 = -(op.basis.Xd[3] * ep.coeffs * op.basis.Yd[0].transpose() +
                                       op.basis.Xd[1] * ep.coeffs * op.basis.Yd[2].transpose());
        const Eigen::MatrixXd G1 = ep.lambda * ep.e1 + op.params.mu * lap1;
        const Eigen::MatrixXd G2 = ep.lambda * ep.e2 + op.params.mu * lap2;
        // rhs_ij = int G1 dx(T_i T_j) + G2 dy(T_i T_j)
        Eigen::MatrixXd W1 = G1, W2 = G2;
        for (int i = 0; i < dom.nx; ++i) {
            W1.row(i) *= dom.wx[i];
            W2.row(i) *= dom.wx[i];
        }
        for (int j = 0; j < dom.ny; ++j) {
            W1.col(j) *= dom.wy[j];
            W2.col(j) *= dom.wy[j];
        }
        Eigen::MatrixXd R = Px[1].transpose() * W1 * Py[0] + Px[0].transpose() * W2 * Py[1];
        Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(
            Eigen::MatrixXd(R.transpose()).data(), pdim);  // row-major flatten (i*py+j)
        Eigen::VectorXd sol = solver.solve(rhs.tail(pdim - 1));
        Eigen::MatrixXd pc = Eigen::MatrixXd::Zero(px, py);
        for (int i = 0; i < px; ++i)
            for (int j = 0; j < py; ++j) {
                const int idx = i * py + j;
                if (idx == 0) continue;
                pc(i, j) = sol(idx - 1);
            }
        ep.p = Px[0] * pc * Py[0].transpose();
        // zero-mean gauge
        double mean = 0.0, area = 0.0;
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) {
                mean += dom.wx[i] * dom.wy[j] * ep.p(i, j);
                area += dom.wx[i] * dom.wy[j];
            }
        ep.p.array() -= mean / area;
    }
    return out;
}

Eigen::MatrixXd mode_field(const StokesOperator& op, const StokesEigenpair& ep, int component,
                           int dx, int dy) {
    if (component == 0) return op.basis.Xd[dx] * ep.coeffs * op.basis.Yd[dy + 1].transpose();
    return -(op.basis.Xd[dx + 1] * ep.coeffs * op.basis.Yd[dy].transpose());
}

StokesChecks basis_checks(const StokesOperator& op, const std::vector<StokesEigenpair>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("basis_checks: no pairs");
    StokesChecks ck;
    const RectDomain& dom = op.basis.dom;
    const int n = static_cast<int>(pairs.size());

    auto dot = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        double s = 0.0;
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) s += dom.wx[i] * dom.wy[j] * a(i, j) * b(i, j);
        return s;
    };

    // gradient samples per pair
    std::vector<Eigen::MatrixXd> e1x(n), e1y(n), e2x(n), e2y(n);
    for (int i = 0; i < n; ++i) {
        e1x[i] = mode_field(op, pairs[i], 0, 1, 0);
        e1y[i] = mode_field(op, pairs[i], 0, 0, 1);
        e2x[i] = mode_field(op, pairs[i], 1, 1, 0);
        e2y[i] = mode_field(op, pairs[i], 1, 0, 1);
    }

    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double l2 = dot(pairs[i].e1, pairs[j].e1) + dot(pairs[i].e2, pairs[j].e2);
            double en = op.params.mu * (dot(e1x[i], e1x[j]) + dot(e1y[i], e1y[j]) +
                                        dot(e2x[i], e2x[j]) + dot(e2y[i], e2y[j]));
            double tr = 0.0;
            for (int ix = 0; ix < dom.nx; ++ix) {
                tr -= op.params.k1 * dom.wx[ix] * pairs[i].e1(ix, dom.ny - 1) * pairs[j].e1(ix, dom.ny - 1);
                tr -= op.params.k0 * dom.wx[ix] * pairs[i].e1(ix, 0) * pairs[j].e1(ix, 0);
            }
            en += tr;
            const double dl2 = (i == j) ? 1.0 : 0.0;
            ck.l2_orthogonality_defect = std::max(ck.l2_orthogonality_defect, std::abs(l2 - dl2));
            const double scale = std::sqrt(pairs[i].lambda * pairs[j].lambda);
            const double den = (i == j) ? pairs[i].lambda : scale;
            ck.energy_orthogonality_defect =
                std::max(ck.energy_orthogonality_defect,
                         std::abs(en - ((i == j) ? pairs[i].lambda : 0.0)) / den);
        }

    // collocation divergence, an independent route from the analytic one
    const Eigen::MatrixXd Dx = diff_matrix(dom.x);
    const Eigen::MatrixXd Dy = diff_matrix(dom.y);
    std::vector<double> navier_res(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXd div = Dx * pairs[i].e1 + pairs[i].e2 * Dy.transpose();
        double gn = std::sqrt(dot(e1x[i], e1x[i]) + dot(e1y[i], e1y[i]) + dot(e2x[i], e2x[i]) +
                              dot(e2y[i], e2y[i]));
        ck.max_divergence = std::max(ck.max_divergence, div.cwiseAbs().maxCoeff() / gn);

        const double emax = std::max(pairs[i].e1.cwiseAbs().maxCoeff(), pairs[i].e2.cwiseAbs().maxCoeff());
        double walls = 0.0, sides = 0.0;
        for (int ix = 0; ix < dom.nx; ++ix)
            walls = std::max({walls, std::abs(pairs[i].e2(ix, 0)), std::abs(pairs[i].e2(ix, dom.ny - 1))});
        for (int jy = 0; jy < dom.ny; ++jy)
            sides = std::max({sides, std::abs(pairs[i].e1(0, jy)), std::abs(pairs[i].e1(dom.nx - 1, jy)),
                              std::abs(pairs[i].e2(0, jy)), std::abs(pairs[i].e2(dom.nx - 1, jy))});
        ck.bc_walls = std::max(ck.bc_walls, walls / emax);
        ck.bc_sides = std::max(ck.bc_sides, sides / emax);

        const double dmax = e1y[i].cwiseAbs().maxCoeff();
        double ntop = 0.0, nbot = 0.0;
        for (int ix = 0; ix < dom.nx; ++ix) {
            ntop = std::max(ntop, std::abs(e1y[i](ix, dom.ny - 1) -
                                           op.params.k1 / op.params.mu * pairs[i].e1(ix, dom.ny - 1)));
            nbot = std::max(nbot, std::abs(e1y[i](ix, 0) +
                                           op.params.k0 / op.params.mu * pairs[i].e1(ix, 0)));
        }
        ck.bc_navier_top = std::max(ck.bc_navier_top, ntop / dmax);
        ck.bc_navier_bottom = std::max(ck.bc_navier_bottom, nbot / dmax);
        navier_res[i] = std::max(ntop, nbot) / dmax;

        // interpolation-inequality constants
        double l4 = 0.0, linf = 0.0, l2 = 0.0, h2extra = 0.0;
        for (int ix = 0; ix < dom.nx; ++ix)
            for (int jy = 0; jy < dom.ny; ++jy) {
                const double q2 = pairs[i].e1(ix, jy) * pairs[i].e1(ix, jy) +
                                  pairs[i].e2(ix, jy) * pairs[i].e2(ix, jy);
                l4 += dom.wx[ix] * dom.wy[jy] * q2 * q2;
                l2 += dom.wx[ix] * dom.wy[jy] * q2;
                linf = std::max(linf, q2);
            }
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; a + b <= 2 && b <= 2; ++b) {
                    if (a + b != 2) continue;
                    const Eigen::MatrixXd f = mode_field(op, pairs[i], c, a, b);
                    h2extra += dot(f, f);
                }
        const double gl2 = dot(e1x[i], e1x[i]) + dot(e1y[i], e1y[i]) + dot(e2x[i], e2x[i]) +
                           dot(e2y[i], e2y[i]);
        const double nl2 = std::sqrt(l2);
        const double ngrad = std::sqrt(gl2);
        const double nh2 = std::sqrt(l2 + gl2 + h2extra);
        ck.c_l4 = std::max(ck.c_l4, std::sqrt(l4) / (nl2 * ngrad));
        ck.c_linf = std::max(ck.c_linf, linf / (nl2 * nh2));
    }

    std::vector<double> sorted = navier_res;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (int i = 0; i < n; ++i)
        if (navier_res[i] > 10.0 * median) ck.bc_outliers.push_back(i);
    return ck;
}

}  // namespace bouss
