#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bouss/cheb.hpp"

namespace bouss {

// Viscosity, gravity and the two wall slip coefficients. Slip coefficients
// must be non-positive; viscosity and gravity strictly positive.
struct PhysicalParams {
    double mu;
    double g;
    double k0;
    double k1;

    PhysicalParams(double mu_, double g_, double k0_, double k1_);
};

struct LinearProfile {
    double beta = -1.0;
};

struct TanhLayerProfile {
    double center = 0.5;  // in (0,1)
    double width = 0.1;   // > 0
    double jump = -1.0;
};

struct TableProfile {
    std::vector<double> x;  // strictly increasing, covering [0,1]
    std::vector<double> value;
};

using ProfileSpec = std::variant<LinearProfile, TanhLayerProfile, TableProfile>;

// Steady temperature background theta(x2) on [0,1] with derivatives and the
// hydrostatic pressure antiderivative (gauge p(0)=0, unit gravity; multiply
// by g for the physical pressure).
class SteadyProfile {
  public:
    SteadyProfile() = default;

    double theta(double x) const { return theta_(x); }
    double dtheta(double x) const { return dtheta_(x); }
    double d2theta(double x) const { return d2theta_(x); }
    double d3theta(double x) const { return d3theta_(x); }
    // integral of theta from 0 to x
    double theta_antiderivative(double x) const { return p_(x); }

    double max_abs_dtheta() const { return max_abs_dtheta_; }
    const std::string& tag() const { return tag_; }

    // fine internal sampling (uniform grid incl. endpoints)
    const std::vector<double>& sample_x() const { return sx_; }
    const std::vector<double>& sample_theta() const { return st_; }
    const std::vector<double>& sample_dtheta() const { return sdt_; }
    const std::vector<double>& sample_p() const { return sp_; }

    int smoothness_order() const { return smoothness_; }

    static SteadyProfile make(const ProfileSpec& spec);

  private:
    std::function<double(double)> theta_, dtheta_, d2theta_, d3theta_, p_;
    std::vector<double> sx_, st_, sdt_, sp_;
    double max_abs_dtheta_ = 0.0;
    std::string tag_;
    int smoothness_ = 0;
};

SteadyProfile make_profile(const ProfileSpec& spec);

// Maximal open subintervals of (0,1) where dtheta < -tol, found by a dense
// scan (>= 1024 samples) refined by bisection at the sign changes. An empty
// result means the instability condition fails everywhere.
std::vector<std::pair<double, double>> rt_unstable_region(const SteadyProfile& profile, double tol = 0.0);

// Hydrostatic pressure samples p(x) = g * int_0^x theta(s) ds at the given
// abscissae (gauge p(0)=0).
std::vector<double> steady_pressure(const SteadyProfile& profile, const PhysicalParams& params,
                                    const std::vector<double>& x);

}  // namespace bouss
