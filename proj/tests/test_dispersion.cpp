#include <doctest.h>

#include <cmath>

#include "bouss/dispersion.hpp"

using namespace bouss;

namespace {
const double kPi = std::acos(-1.0);

struct Setup {
    Grid1D grid;
    Basis01 basis;
    Setup(int n, int m) : grid(build_grid(n)), basis(build_basis(grid, m)) {}
};

// Free-slip constant-slope closed forms, from the sine-mode reduction:
// the n-th mode gives E/J = s*mu*kappa - g*beta*xi^2/kappa with
// kappa = (n pi)^2 + xi^2, minimized at n=1; the growth rate solves
// lambda^2 + mu*kappa*lambda - g*beta*xi^2/kappa = 0.
double oracle_lambda0(double mu, double g, double beta, double xi) {
    const double kappa = kPi * kPi + xi * xi;
    return 0.5 * (-mu * kappa + std::sqrt(mu * mu * kappa * kappa + 4.0 * g * beta * xi * xi / kappa));
}
double oracle_lambda_c(double mu, double g, double beta, double xi) {
    const double kappa = kPi * kPi + xi * xi;
    return g * beta * xi * xi / (mu * kappa * kappa);
}
}  // namespace

TEST_CASE("free-slip growth rates match the closed form") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});

    for (double xi : {kPi / 2.0, kPi, 2.0 * kPi}) {
        auto gp = growth_rate(s.basis, s.grid, prof, pp, xi, 1e-12);
        REQUIRE(gp.lambda0.has_value());
        REQUIRE(gp.lambda_c.has_value());
        const double expect = oracle_lambda0(1.0, 1.0, 1.0, xi);
        CHECK(*gp.lambda0 == doctest::Approx(expect).epsilon(1e-6));
        CHECK(*gp.lambda_c == doctest::Approx(oracle_lambda_c(1.0, 1.0, 1.0, xi)).epsilon(1e-8));
        CHECK(*gp.lambda0 < *gp.lambda_c);
        // root certificate
        CHECK(std::abs(gp.phi_at_lambda0 + *gp.lambda0 * *gp.lambda0) < 1e-10 * *gp.lambda_c * 10.0);
    }

    // reference values quoted for xi = pi
    auto gp = growth_rate(s.basis, s.grid, prof, pp, kPi, 1e-12);
    CHECK(*gp.lambda0 == doctest::Approx(0.0252971).epsilon(1e-4));
    CHECK(*gp.lambda_c == doctest::Approx(0.0253303).epsilon(1e-4));
}

TEST_CASE("stable profile yields no growth rate") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{+1.0});
    for (double xi : {1.0, kPi, 10.0}) {
        auto gp = growth_rate(s.basis, s.grid, prof, pp, xi, 1e-10);
        CHECK_FALSE(gp.lambda0.has_value());
        CHECK_FALSE(gp.lambda_c.has_value());
    }
}

TEST_CASE("growth rate input validation") {
    Setup s(48, 24);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    CHECK_THROWS(growth_rate(s.basis, s.grid, prof, pp, 0.0, 1e-10));
    CHECK_THROWS(growth_rate(s.basis, s.grid, prof, pp, kPi, 0.0));
}

TEST_CASE("dispersion curve on a coarse grid") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    std::vector<double> grid = {kPi / 2.0, kPi, 2.0 * kPi, 4.0 * kPi};
    auto curve = dispersion_curve(s.basis, s.grid, prof, pp, grid, 1e-11);
    REQUIRE(curve.points.size() == 4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(curve.points[i].lambda0.has_value());
        CHECK(*curve.points[i].lambda0 ==
              doctest::Approx(oracle_lambda0(1.0, 1.0, 1.0, grid[i])).epsilon(1e-6));
    }
    CHECK(*curve.points[3].lambda0 < *curve.points[1].lambda0);  // large-xi decay
    CHECK_FALSE(curve.all_stable);
    CHECK(curve.capital_lambda > 0.0);

    CHECK_THROWS(dispersion_curve(s.basis, s.grid, prof, pp, {1.0, 2.0}, 1e-10));
    CHECK_THROWS(dispersion_curve(s.basis, s.grid, prof, pp, {2.0, 1.0, 3.0}, 1e-10));
    CHECK_THROWS(dispersion_curve(s.basis, s.grid, prof, pp, {-1.0, 1.0, 2.0}, 1e-10));
}

TEST_CASE("all-stable curve is flagged") {
    Setup s(64, 32);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{+0.5});
    auto curve = dispersion_curve(s.basis, s.grid, prof, pp, {1.0, 2.0, 4.0}, 1e-10);
    CHECK(curve.all_stable);
    CHECK(curve.capital_lambda == 0.0);
}

TEST_CASE("maximal growth rate against a scan of the closed form") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    std::vector<double> grid;
    for (int i = 0; i < 48; ++i) grid.push_back(0.1 * std::pow(50.0 / 0.1, i / 47.0));
    auto curve = dispersion_curve(s.basis, s.grid, prof, pp, grid, 1e-10);

    double best = 0.0;
    for (double xi = 0.05; xi < 50.0; xi += 0.001) best = std::max(best, oracle_lambda0(1.0, 1.0, 1.0, xi));
    CHECK(curve.capital_lambda == doctest::Approx(best).epsilon(1e-4));

    // ordering and threshold bounds at every swept point
    for (const auto& p : curve.points) {
        REQUIRE(p.lambda_c.has_value());
        CHECK(*p.lambda0 < *p.lambda_c);
        CHECK(*p.lambda_c <= pp.g * prof.max_abs_dtheta() / (2.0 * pp.mu) + 1e-12);
        CHECK(*p.lambda_c <= pp.g * prof.max_abs_dtheta() / (pp.mu * p.xi * p.xi) + 1e-12);
    }

    // large-xi decay relative to the peak
    const auto& tail = curve.points.back();
    CHECK(tail.xi >= 10.0 * curve.argmax_xi);
    CHECK(*tail.lambda0 < 0.1 * curve.capital_lambda);
}

TEST_CASE("viscosity is stabilizing") {
    Setup s(96, 64);
    auto prof = make_profile(LinearProfile{-1.0});
    std::vector<double> grid;
    for (int i = 0; i < 24; ++i) grid.push_back(0.3 * std::pow(30.0 / 0.3, i / 23.0));
    double prev = 1e300;
    for (double mu : {1.0, 2.0, 4.0}) {
        PhysicalParams pp(mu, 1.0, 0.0, 0.0);
        auto curve = dispersion_curve(s.basis, s.grid, prof, pp, grid, 1e-10);
        CHECK(curve.capital_lambda < prev);
        prev = curve.capital_lambda;
    }
}

TEST_CASE("refining the grid near the peak changes the maximum only slightly") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    std::vector<double> coarse, fine;
    for (int i = 0; i < 16; ++i) coarse.push_back(0.5 * std::pow(20.0 / 0.5, i / 15.0));
    for (int i = 0; i < 32; ++i) fine.push_back(0.5 * std::pow(20.0 / 0.5, i / 31.0));
    auto c1 = dispersion_curve(s.basis, s.grid, prof, pp, coarse, 1e-10);
    auto c2 = dispersion_curve(s.basis, s.grid, prof, pp, fine, 1e-10);
    CHECK(std::abs(c1.capital_lambda - c2.capital_lambda) < 0.01 * c2.capital_lambda);
}

TEST_CASE("infimum of the growth rate over a support interval") {
    Setup s(96, 64);
    PhysicalParams pp(1.0, 1.0, 0.0, 0.0);
    auto prof = make_profile(LinearProfile{-1.0});
    std::vector<double> grid;
    for (int i = 0; i < 32; ++i) grid.push_back(0.5 + (20.0 - 0.5) * i / 31.0);
    auto curve = dispersion_curve(s.basis, s.grid, prof, pp, grid, 1e-10);

    // singleton support
    const double x5 = grid[5];
    CHECK(lambda_f(curve, {x5, x5}) == doctest::Approx(*curve.points[5].lambda0).epsilon(1e-12));

    // sublevel-set support around the peak: inf >= Lambda/2
    const double half = curve.capital_lambda / 2.0;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const double a = *curve.points[i].lambda0, b = *curve.points[i + 1].lambda0;
        if (a < half && b >= half) lo = curve.points[i + 1].xi;
        if (a >= half && b < half) hi = curve.points[i].xi;
    }
    REQUIRE(lo > 0.0);
    REQUIRE(hi > lo);
    const double lf = lambda_f(curve, {lo, hi});
    CHECK(lf >= half * (1.0 - 1e-12));

    // support outside the range errors out
    CHECK_THROWS(lambda_f(curve, {0.01, 1.0}));
    // a stable point inside the support errors out
    auto sc = dispersion_curve(s.basis, s.grid, prof, pp, {1.0, 2.0, 3.0}, 1e-10);
    GrowthCurve mixed = sc;
    mixed.points[1].lambda0.reset();
    CHECK_THROWS(lambda_f(mixed, {1.0, 3.0}));
}
