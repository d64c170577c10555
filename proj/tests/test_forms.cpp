#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bouss/forms.hpp"

using namespace bouss;

namespace {
const double kPi = std::acos(-1.0);

struct Setup {
    Grid1D grid;
    Basis01 basis;
    Setup(int n, int m) : grid(build_grid(n)), basis(build_basis(grid, m)) {}
};

// expand f into the basis by L2 projection
Eigen::VectorXd expand(const Setup& s, double (*f)(double)) {
    Eigen::MatrixXd wv = s.basis.val;
    for (int i = 0; i < s.grid.n; ++i) wv.row(i) *= s.grid.weights[i];
    Eigen::MatrixXd G = wv.transpose() * s.basis.val;
    Eigen::VectorXd fv(s.grid.n);
    for (int i = 0; i < s.grid.n; ++i) fv[i] = f(s.grid.nodes[i]);
    return G.ldlt().solve(wv.transpose() * fv);
}

double sinpi(double x) { return std::sin(kPi * x); }
}  // namespace

TEST_CASE("assembled forms reproduce closed-form values on the sine mode") {
    Setup s(96, 64);
    PhysicalParams freeslip(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    auto fm = assemble_forms(s.basis, s.grid, prof, freeslip, kPi);
    Eigen::VectorXd w = expand(s, sinpi);

    const double e0 = w.dot(fm.e0 * w);
    const double e1 = w.dot(fm.e1 * w);
    const double e2 = w.dot(fm.e2 * w);
    const double j = w.dot(fm.j * w);
    CHECK(e0 == doctest::Approx(2.0 * std::pow(kPi, 4)).epsilon(1e-10));
    CHECK(std::abs(e1) < 1e-10);
    CHECK(e2 == doctest::Approx(-kPi * kPi / 2.0).epsilon(1e-10));
    CHECK(j == doctest::Approx(kPi * kPi).epsilon(1e-10));

    // E at s=1 combines the values above
    CHECK(evaluate_E(fm, w, 1.0) ==
          doctest::Approx(2.0 * std::pow(kPi, 4) - kPi * kPi / 2.0).epsilon(1e-10));
    CHECK(evaluate_J(fm, w) == doctest::Approx(kPi * kPi).epsilon(1e-10));

    // zero vector gives zero for all forms
    Eigen::VectorXd z = Eigen::VectorXd::Zero(s.basis.m);
    CHECK(evaluate_E(fm, z, 1.0) == 0.0);
    CHECK(evaluate_J(fm, z) == 0.0);
}

TEST_CASE("boundary form from endpoint traces") {
    Setup s(96, 64);
    PhysicalParams slip(1.0, 1.0, -1.0, -1.0);
    auto prof = make_profile(LinearProfile{-1.0});
    auto fm = assemble_forms(s.basis, s.grid, prof, slip, kPi);
    Eigen::VectorXd w = expand(s, sinpi);
    // DW(0)=pi, DW(1)=-pi  =>  E1 = pi^2 + pi^2
    CHECK(w.dot(fm.e1 * w) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-9));
}

TEST_CASE("xi = 0 is rejected") {
    Setup s(48, 24);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    CHECK_THROWS(assemble_forms(s.basis, s.grid, prof, pp, 0.0));
}

TEST_CASE("matrix structure: symmetry, definiteness, sign structure") {
    Setup s(96, 64);
    PhysicalParams pp(0.7, 2.0, -0.5, -1.5);
    auto prof = make_profile(TanhLayerProfile{0.5, 0.1, -1.0});
    auto fm = assemble_forms(s.basis, s.grid, prof, pp, 2.0);

    auto asym = [](const Eigen::MatrixXd& a) {
        return (a - a.transpose()).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
    };
    CHECK(asym(fm.e0) < 1e-12);
    CHECK(asym(fm.e2) < 1e-12);
    CHECK(asym(fm.j) < 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ej(fm.j);
    CHECK(ej.eigenvalues().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e0(fm.e0);
    CHECK(e0.eigenvalues().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(fm.e1);
    CHECK(e1.eigenvalues().minCoeff() > -1e-12 * fm.e1.norm());
    // rank <= 2: third-largest eigenvalue vanishes
    const auto ev = e1.eigenvalues();
    CHECK(std::abs(ev[ev.size() - 3]) < 1e-10 * ev[ev.size() - 1]);

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd w(s.basis.m);
        for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
        CHECK(w.dot((fm.e0 + fm.e1) * w) > 0.0);
    }
}

TEST_CASE("quadratic homogeneity is exact") {
    Setup s(48, 24);
    PhysicalParams pp(1.0, 1.0, -1.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    auto fm = assemble_forms(s.basis, s.grid, prof, pp, 3.0);
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd w(s.basis.m);
    for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    CHECK(evaluate_J(fm, Eigen::VectorXd(2.0 * w)) == doctest::Approx(4.0 * evaluate_J(fm, w)).epsilon(1e-14));
    CHECK(evaluate_E(fm, Eigen::VectorXd(2.0 * w), 0.37) ==
          doctest::Approx(4.0 * evaluate_E(fm, w, 0.37)).epsilon(1e-14));
}

TEST_CASE("stable profile makes E positive") {
    Setup s(64, 32);
    PhysicalParams pp(1.0, 1.0, -1.0, -1.0);
    auto prof = make_profile(LinearProfile{+1.0});
    auto fm = assemble_forms(s.basis, s.grid, prof, pp, kPi);
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd w(s.basis.m);
        for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
        CHECK(evaluate_E(fm, w, 0.01 + trial) > 0.0);
    }
}

TEST_CASE("pencil eigenvalue is mesh-converged") {
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    auto smallest = [&](int n, int m) {
        Setup s(n, m);
        auto fm = assemble_forms(s.basis, s.grid, prof, pp, kPi);
        const double sv = 0.01;
        Eigen::MatrixXd A = sv * (fm.e0 + fm.e1) + fm.e2;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, fm.j);
        return es.eigenvalues()(0);
    };
    const double a = smallest(96, 64);
    const double b = smallest(144, 96);
    CHECK(std::abs(a - b) < 1e-8 * std::abs(b));
}
