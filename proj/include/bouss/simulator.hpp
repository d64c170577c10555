#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bouss/stokes2d.hpp"

namespace bouss {

// Velocity state: coefficients of the divergence-free eigenbasis.
struct GalerkinState {
    Eigen::VectorXd f;
    double t = 0.0;
};

struct ThetaField {
    Eigen::MatrixXd vals;  // nx x ny nodal samples
    int interp_order = 6;  // local Lagrange stencil width (4 or 6)
};

// One-step backward characteristics: departure points for every node.
struct FlowMap {
    Eigen::MatrixXd ax, ay;
    long clamped = 0;
};

// T(i,j,k) = int (e_j . grad) e_k . e_i dx. Antisymmetric in (i, k) for the
// divergence-free impermeable basis, which makes it energy-neutral.
struct NonlinearTensor {
    int m = 0;
    std::vector<double> coef;
    double operator()(int i, int j, int k) const { return coef[(i * m + j) * m + k]; }
};

NonlinearTensor nonlinear_tensor(const StokesOperator& op, const std::vector<StokesEigenpair>& pairs);

// Local Lagrange interpolation on the tensor grid.
double interp2(const RectDomain& dom, const Eigen::MatrixXd& F, double qx, double qy, int order);

// Backward RK4 characteristics in the frozen velocity field (u1, u2) sampled
// on the grid; departure points clamped to the closed rectangle.
FlowMap flow_map(const RectDomain& dom, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2,
                 double dt, int order);

// Pure transport of theta along the characteristics of (u1, u2).
ThetaField advance_theta(const RectDomain& dom, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2,
                         const ThetaField& theta, double dt);

enum class SystemKind { Full, Perturbed };
enum class ModeKind { Linearized, Nonlinear };

struct SimConfig {
    SystemKind system = SystemKind::Perturbed;
    ModeKind mode = ModeKind::Linearized;
    double dt = 1e-3;
    double cfl = 0.5;
    int interp_order = 6;
};

struct Diagnostics {
    double t = 0.0;
    double kinetic = 0.0;       // 0.5 ||u||^2
    double grad_u_sq = 0.0;     // ||grad u||^2
    double slip = 0.0;          // wall trace contribution to the energy form
    double theta_l2 = 0.0;
    double theta_l4 = 0.0;
    double theta_linf = 0.0;
    double v2_l2 = 0.0;
    double cfl = 0.0;
    bool energy_bound_ok = true;      // a-priori exponential bound
    bool theta_range_ok = true;       // transport max principle (1e-3 of range)
    long clamped = 0;
};

class Simulator {
  public:
    Simulator(StokesOperator op, std::vector<StokesEigenpair> pairs, SteadyProfile profile,
              SimConfig cfg);

    void set_velocity(const Eigen::VectorXd& f);
    // L2 projection of a sampled velocity onto the modal basis
    Eigen::VectorXd project_velocity(const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2) const;
    void set_theta(const Eigen::MatrixXd& theta);

    // modal right-hand side with a frozen buoyancy projection b
    Eigen::VectorXd modal_rhs(const Eigen::VectorXd& f, const Eigen::VectorXd& b) const;
    Eigen::VectorXd buoyancy(const Eigen::MatrixXd& theta) const;

    void step();
    void run(double T);

    Diagnostics diagnostics() const;
    const GalerkinState& state() const { return state_; }
    const ThetaField& theta() const { return theta_; }
    const StokesOperator& op() const { return op_; }
    const RectDomain& domain() const { return op_.basis.dom; }
    const std::vector<StokesEigenpair>& pairs() const { return pairs_; }

    // sampled modal velocity for a coefficient vector
    void velocity_fields(const Eigen::VectorXd& f, Eigen::MatrixXd& u1, Eigen::MatrixXd& u2) const;
    double v2_l2(const Eigen::VectorXd& f) const;
    double max_speed(const Eigen::VectorXd& f) const;
    // advective stability number with node-local spacings
    double cfl_number(const Eigen::VectorXd& f, double dt) const;
    long clamp_count() const { return clamped_total_; }

  private:
    void theta_step(const Eigen::VectorXd& fmid, double dt);

    StokesOperator op_;
    std::vector<StokesEigenpair> pairs_;
    SteadyProfile profile_;
    SimConfig cfg_;
    GalerkinState state_;
    ThetaField theta_;
    NonlinearTensor tensor_;
    Eigen::VectorXd lambdas_;
    Eigen::MatrixXd m22_;        // v2 mass Gram
    Eigen::MatrixXd grad_gram_;  // int grad e_i : grad e_j
    Eigen::MatrixXd trace_gram_; // -k1 (top traces) - k0 (bottom traces)
    Eigen::VectorXd dtheta_y_;   // background slope at grid heights
    double hmin_ = 0.0;
    Eigen::VectorXd hx_local_, hy_local_;
    double init_norm2_ = 0.0;    // ||theta0||^2 + ||u0||^2 (or perturbed analogue)
    double theta0_min_ = 0.0, theta0_max_ = 0.0, theta0_range_ = 0.0;
    long clamped_total_ = 0;
    bool init_captured_ = false;
};

}  // namespace bouss
