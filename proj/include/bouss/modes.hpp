#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bouss/dispersion.hpp"

namespace bouss {

// Full linear mode at one frequency: velocity amplitudes (u1, u2), pressure
// amplitude varpi and temperature amplitude h as functions of height. u2 is
// the J-normalized scalar amplitude; u1 = -u2'/xi closes the divergence, h
// closes the transport equation, varpi closes the horizontal momentum
// equation.
class Mode {
  public:
    double xi = 0.0;
    double lambda0 = 0.0;

    // evaluate amplitudes and derivatives (deriv in 0..2; h needs profile
    // derivatives up to order deriv+1)
    double u1(double y, int deriv = 0) const;
    double u2(double y, int deriv = 0) const;
    double varpi(double y, int deriv = 0) const;
    double h(double y, int deriv = 0) const;

    const SteadyProfile& profile() const { return profile_; }

  private:
    friend Mode build_mode(const GrowthPoint&, const Basis01&, const SteadyProfile&,
                           const PhysicalParams&);
    std::vector<double> cu1_, cu2_, cvarpi_;  // Chebyshev series in t = 2 x2 - 1
    SteadyProfile profile_;
};

Mode build_mode(const GrowthPoint& gp, const Basis01& basis, const SteadyProfile& profile,
                const PhysicalParams& params);

// Which closure provides the temperature amplitude when evaluating residuals:
// Transport uses -u2 * dtheta / lambda0 (the transport-equation closure, the
// one build_mode uses); VelocityGradient uses -u2' / lambda0 for comparison.
enum class ThetaAmplitude { Transport, VelocityGradient };

struct ModeResidual {
    double momentum_x = 0.0;
    double momentum_y = 0.0;
    double transport = 0.0;
    double divergence = 0.0;
    double bc_u2 = 0.0;
    double bc_top = 0.0;
    double bc_bottom = 0.0;
    double max_all() const;
};

ModeResidual mode_residual(const Mode& m, const Grid1D& grid, const PhysicalParams& params,
                           ThetaAmplitude amp = ThetaAmplitude::Transport);

// ---------------------------------------------------------------------------
// Fourier synthesis of real growing solutions on the strip

// Smooth compactly supported weight: f(r) = exp(-1/(1-u^2)) for |u| < 1 with
// u = (r - center)/halfwidth, zero otherwise.
struct SynthBand {
    double center = 0.0;
    double halfwidth = 0.0;
    double operator()(double r) const;
};

// One quadrature node of the synthesis integral.
struct XiQuadMode {
    double xi = 0.0;
    double weight = 0.0;  // quadrature weight
    double f = 0.0;       // band weight at xi
    Mode mode;
};

// Build modes at Gauss-Legendre nodes over the band support; doubles the rule
// (up to twice) until the synthesized norms are quadrature-converged to 1e-8.
// Throws if any node is stable (band not admissible).
std::vector<XiQuadMode> synthesis_modes(const Basis01& basis, const Grid1D& grid,
                                        const SteadyProfile& profile, const PhysicalParams& params,
                                        const SynthBand& band, int n_quad = 33, double tol = 1e-10);

struct SynthesizedFields {
    std::vector<double> times;
    Eigen::VectorXd x1, wx1;  // horizontal evaluation nodes and weights
    Eigen::VectorXd y, wy;    // vertical nodes and weights
    SynthBand band;
    double lambda_min = 0.0, lambda_max = 0.0;  // growth-rate range over the band

    // fields[t][f].d[i][j] = d^i/dx1^i d^j/dy^j of field f at time t
    // field order: 0 = v1, 1 = v2, 2 = pressure, 3 = theta
    struct Derivs {
        Eigen::MatrixXd d[3][3];
        Eigen::MatrixXd dt;  // time derivative of the field itself
    };
    struct Snapshot {
        Derivs field[4];
    };
    std::vector<Snapshot> snaps;

    const Eigen::MatrixXd& at(int t, int field, int dx = 0, int dy = 0) const {
        return snaps[t].field[field].d[dx][dy];
    }
};

// Evaluate the synthesized solution on a tensor grid. The horizontal rule
// (x1, wx1) should cover the decay range of the envelope; the vertical rule
// is the shared 1D grid.
SynthesizedFields synthesize(const std::vector<XiQuadMode>& modes, const SynthBand& band,
                             const std::vector<double>& times, const Eigen::VectorXd& x1,
                             const Eigen::VectorXd& wx1, const Grid1D& ygrid);

// Default horizontal quadrature for a band: Gauss-Legendre on [-L, L] with
// L = width_mult * 2*pi / halfwidth.
void default_x1_rule(const SynthBand& band, double width_mult, Eigen::VectorXd& x1,
                     Eigen::VectorXd& wx1);

// Discrete H^k norm (k = 0,1,2) of (v1, v2, pressure, theta) at one time.
double hk_norm(const SynthesizedFields& sf, int k, int t_index);

}  // namespace bouss
