#include "bouss/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bouss {

NonlinearTensor nonlinear_tensor(const StokesOperator& op, const std::vector<StokesEigenpair>& pairs) {
    const int m = static_cast<int>(pairs.size());
    const RectDomain& dom = op.basis.dom;

    // quadrature must integrate triple products of basis derivatives
    const int degx = ((op.basis.sector == Sector::Full) ? op.basis.mx : 2 * op.basis.mx) + 4;
    if (2 * dom.nx - 3 < 3 * degx)
        throw std::invalid_argument("nonlinear_tensor: nx too small for exact triple products (raise nx or lower mx)");
    const int degy = op.basis.my + 2;
    if (2 * dom.ny - 3 < 3 * degy)
        throw std::invalid_argument("nonlinear_tensor: ny too small for exact triple products (raise ny or lower my)");

    std::vector<Eigen::MatrixXd> e1x(m), e1y(m), e2x(m), e2y(m), we1(m), we2(m);
    for (int i = 0; i < m; ++i) {
        e1x[i] = mode_field(op, pairs[i], 0, 1, 0);
        e1y[i] = mode_field(op, pairs[i], 0, 0, 1);
        e2x[i] = mode_field(op, pairs[i], 1, 1, 0);
        e2y[i] = mode_field(op, pairs[i], 1, 0, 1);
        we1[i] = pairs[i].e1;
        we2[i] = pairs[i].e2;
        for (int ix = 0; ix < dom.nx; ++ix) {
            we1[i].row(ix) *= dom.wx[ix];
            we2[i].row(ix) *= dom.wx[ix];
        }
        for (int jy = 0; jy < dom.ny; ++jy) {
            we1[i].col(jy) *= dom.wy[jy];
            we2[i].col(jy) *= dom.wy[jy];
        }
    }

    NonlinearTensor T;
    T.m = m;
    T.coef.assign(static_cast<std::size_t>(m) * m * m, 0.0);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const Eigen::MatrixXd F1 =
                pairs[j].e1.cwiseProduct(e1x[k]) + pairs[j].e2.cwiseProduct(e1y[k]);
            const Eigen::MatrixXd F2 =
                pairs[j].e1.cwiseProduct(e2x[k]) + pairs[j].e2.cwiseProduct(e2y[k]);
            for (int i = 0; i < m; ++i)
                T.coef[(static_cast<std::size_t>(i) * m + j) * m + k] =
                    F1.cwiseProduct(we1[i]).sum() + F2.cwiseProduct(we2[i]).sum();
        }
    return T;
}

namespace {

int stencil_start(const Eigen::VectorXd& nodes, double q, int order) {
    const int n = static_cast<int>(nodes.size());
    int hi = static_cast<int>(std::upper_bound(nodes.data(), nodes.data() + n, q) - nodes.data());
    int start = hi - order / 2;
    start = std::max(0, std::min(start, n - order));
    return start;
}

void lagrange_weights(const Eigen::VectorXd& nodes, int start, int order, double q, double* w) {
    for (int a = 0; a < order; ++a) {
        double p = 1.0;
        for (int b = 0; b < order; ++b) {
            if (a == b) continue;
            p *= (q - nodes[start + b]) / (nodes[start + a] - nodes[start + b]);
        }
        w[a] = p;
    }
}

}  // namespace

double interp2(const RectDomain& dom, const Eigen::MatrixXd& F, double qx, double qy, int order) {
    if (order != 4 && order != 6) throw std::invalid_argument("interp2: order must be 4 or 6");
    const int sx = stencil_start(dom.x, qx, order);
    const int sy = stencil_start(dom.y, qy, order);
    double wx[6], wy[6];
    lagrange_weights(dom.x, sx, order, qx, wx);
    lagrange_weights(dom.y, sy, order, qy, wy);
    double s = 0.0;
    for (int a = 0; a < order; ++a) {
        double row = 0.0;
        for (int b = 0; b < order; ++b) row += wy[b] * F(sx + a, sy + b);
        s += wx[a] * row;
    }
    return s;
}

FlowMap flow_map(const RectDomain& dom, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2,
                 double dt, int order) {
    FlowMap fm;
    fm.ax.resize(dom.nx, dom.ny);
    fm.ay.resize(dom.nx, dom.ny);
    auto clampx = [&](double v) { return std::min(dom.r, std::max(-dom.r, v)); };
    auto clampy = [&](double v) { return std::min(1.0, std::max(0.0, v)); };
    auto vel = [&](double qx, double qy, double& a, double& b) {
        const double cx = clampx(qx), cy = clampy(qy);
        a = interp2(dom, u1, cx, cy, order);
        b = interp2(dom, u2, cx, cy, order);
    };
    for (int i = 0; i < dom.nx; ++i)
        for (int j = 0; j < dom.ny; ++j) {
            const double x = dom.x[i], y = dom.y[j];
            double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
            vel(x, y, k1x, k1y);
            vel(x - 0.5 * dt * k1x, y - 0.5 * dt * k1y, k2x, k2y);
            vel(x - 0.5 * dt * k2x, y - 0.5 * dt * k2y, k3x, k3y);
            vel(x - dt * k3x, y - dt * k3y, k4x, k4y);
            double ax = x - dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            double ay = y - dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            if (ax < -dom.r || ax > dom.r || ay < 0.0 || ay > 1.0) {
                ++fm.clamped;
                ax = clampx(ax);
                ay = clampy(ay);
            }
            fm.ax(i, j) = ax;
            fm.ay(i, j) = ay;
        }
    return fm;
}

ThetaField advance_theta(const RectDomain& dom, const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2,
                         const ThetaField& theta, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance_theta: dt must be positive");
    ThetaField out = theta;
    FlowMap fm = flow_map(dom, u1, u2, dt, theta.interp_order);
    for (int i = 0; i < dom.nx; ++i)
        for (int j = 0; j < dom.ny; ++j)
            out.vals(i, j) = interp2(dom, theta.vals, fm.ax(i, j), fm.ay(i, j), theta.interp_order);
    return out;
}

Simulator::Simulator(StokesOperator op, std::vector<StokesEigenpair> pairs, SteadyProfile profile,
                     SimConfig cfg)
    : op_(std::move(op)), pairs_(std::move(pairs)), profile_(std::move(profile)), cfg_(cfg) {
    const int m = static_cast<int>(pairs_.size());
    if (m == 0) throw std::invalid_argument("Simulator: empty mode set");
    const RectDomain& dom = op_.basis.dom;

    lambdas_.resize(m);
    for (int i = 0; i < m; ++i) lambdas_[i] = pairs_[i].lambda;

    // stiffness limit of the explicit modal integrator
    if (cfg_.dt * lambdas_.maxCoeff() > 2.78)
        throw std::invalid_argument("Simulator: dt too large for the stiffest retained mode (dt*lambda_max > 2.78)");

    m22_.setZero(m, m);
    trace_gram_.setZero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double s = 0.0;
            for (int ix = 0; ix < dom.nx; ++ix)
                for (int jy = 0; jy < dom.ny; ++jy)
                    s += dom.wx[ix] * dom.wy[jy] * pairs_[i].e2(ix, jy) * pairs_[j].e2(ix, jy);
            m22_(i, j) = m22_(j, i) = s;
            double tr = 0.0;
            for (int ix = 0; ix < dom.nx; ++ix) {
                tr -= op_.params.k1 * dom.wx[ix] * pairs_[i].e1(ix, dom.ny - 1) * pairs_[j].e1(ix, dom.ny - 1);
                tr -= op_.params.k0 * dom.wx[ix] * pairs_[i].e1(ix, 0) * pairs_[j].e1(ix, 0);
            }
            trace_gram_(i, j) = trace_gram_(j, i) = tr;
        }
    grad_gram_ = (Eigen::MatrixXd(lambdas_.asDiagonal()) + trace_gram_) / op_.params.mu;

    dtheta_y_.resize(dom.ny);
    for (int j = 0; j < dom.ny; ++j) dtheta_y_[j] = profile_.dtheta(dom.y[j]);

    hmin_ = 1e300;
    for (int i = 1; i < dom.nx; ++i) hmin_ = std::min(hmin_, dom.x[i] - dom.x[i - 1]);
    for (int j = 1; j < dom.ny; ++j) hmin_ = std::min(hmin_, dom.y[j] - dom.y[j - 1]);
    // local spacings for the advective stability number (velocity vanishes at
    // the clustered wall nodes, so a global minimum would be meaningless)
    hx_local_.resize(dom.nx);
    hy_local_.resize(dom.ny);
    for (int i = 0; i < dom.nx; ++i) {
        double h = 1e300;
        if (i > 0) h = std::min(h, dom.x[i] - dom.x[i - 1]);
        if (i + 1 < dom.nx) h = std::min(h, dom.x[i + 1] - dom.x[i]);
        hx_local_[i] = h;
    }
    for (int j = 0; j < dom.ny; ++j) {
        double h = 1e300;
        if (j > 0) h = std::min(h, dom.y[j] - dom.y[j - 1]);
        if (j + 1 < dom.ny) h = std::min(h, dom.y[j + 1] - dom.y[j]);
        hy_local_[j] = h;
    }

    if (cfg_.mode == ModeKind::Nonlinear) tensor_ = nonlinear_tensor(op_, pairs_);

    state_.f.setZero(m);
    theta_.vals.setZero(dom.nx, dom.ny);
    theta_.interp_order = cfg_.interp_order;
}

void Simulator::set_velocity(const Eigen::VectorXd& f) {
    if (f.size() != state_.f.size()) throw std::invalid_argument("set_velocity: wrong size");
    state_.f = f;
    init_captured_ = false;
}

Eigen::VectorXd Simulator::project_velocity(const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2) const {
    const RectDomain& dom = op_.basis.dom;
    const int m = static_cast<int>(pairs_.size());
    Eigen::VectorXd f(m);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j)
                s += dom.wx[i] * dom.wy[j] *
                     (u1(i, j) * pairs_[k].e1(i, j) + u2(i, j) * pairs_[k].e2(i, j));
        f[k] = s;
    }
    return f;
}

void Simulator::set_theta(const Eigen::MatrixXd& theta) {
    if (theta.rows() != op_.basis.dom.nx || theta.cols() != op_.basis.dom.ny)
        throw std::invalid_argument("set_theta: wrong shape");
    theta_.vals = theta;
    init_captured_ = false;
}

Eigen::VectorXd Simulator::buoyancy(const Eigen::MatrixXd& theta) const {
    const RectDomain& dom = op_.basis.dom;
    const int m = static_cast<int>(pairs_.size());
    Eigen::VectorXd b(m);
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j)
                s += dom.wx[i] * dom.wy[j] * theta(i, j) * pairs_[k].e2(i, j);
        b[k] = op_.params.g * s;
    }
    return b;
}

Eigen::VectorXd Simulator::modal_rhs(const Eigen::VectorXd& f, const Eigen::VectorXd& b) const {
    Eigen::VectorXd r = -lambdas_.cwiseProduct(f) + b;
    if (cfg_.mode == ModeKind::Nonlinear) {
        const int m = static_cast<int>(f.size());
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) {
                if (f[j] == 0.0) continue;
                double acc = 0.0;
                for (int k = 0; k < m; ++k) acc += tensor_(i, j, k) * f[k];
                s += f[j] * acc;
            }
            r[i] -= s;
        }
    }
    return r;
}

void Simulator::velocity_fields(const Eigen::VectorXd& f, Eigen::MatrixXd& u1, Eigen::MatrixXd& u2) const {
    const RectDomain& dom = op_.basis.dom;
    u1.setZero(dom.nx, dom.ny);
    u2.setZero(dom.nx, dom.ny);
    for (int k = 0; k < f.size(); ++k) {
        if (f[k] == 0.0) continue;
        u1 += f[k] * pairs_[k].e1;
        u2 += f[k] * pairs_[k].e2;
    }
}

double Simulator::v2_l2(const Eigen::VectorXd& f) const { return std::sqrt(f.dot(m22_ * f)); }

double Simulator::max_speed(const Eigen::VectorXd& f) const {
    Eigen::MatrixXd u1, u2;
    velocity_fields(f, u1, u2);
    return std::sqrt((u1.cwiseProduct(u1) + u2.cwiseProduct(u2)).maxCoeff());
}

double Simulator::cfl_number(const Eigen::VectorXd& f, double dt) const {
    const RectDomain& dom = op_.basis.dom;
    Eigen::MatrixXd u1, u2;
    velocity_fields(f, u1, u2);
    double c = 0.0;
    for (int i = 0; i < dom.nx; ++i)
        for (int j = 0; j < dom.ny; ++j)
            c = std::max(c, std::abs(u1(i, j)) * dt / hx_local_[i] +
                                std::abs(u2(i, j)) * dt / hy_local_[j]);
    return c;
}

void Simulator::theta_step(const Eigen::VectorXd& fmid, double dt) {
    const RectDomain& dom = op_.basis.dom;
    if (cfg_.system == SystemKind::Full && theta_.vals.cwiseAbs().maxCoeff() == 0.0) return;
    Eigen::MatrixXd u1, u2;
    velocity_fields(fmid, u1, u2);

    if (cfg_.system == SystemKind::Perturbed && cfg_.mode == ModeKind::Linearized) {
        // no advection: pointwise source with the midpoint velocity
        for (int i = 0; i < dom.nx; ++i)
            for (int j = 0; j < dom.ny; ++j) theta_.vals(i, j) -= dt * u2(i, j) * dtheta_y_[j];
        return;
    }

    FlowMap full = flow_map(dom, u1, u2, dt, cfg_.interp_order);
    FlowMap half = flow_map(dom, u1, u2, 0.5 * dt, cfg_.interp_order);
    clamped_total_ += full.clamped;
    Eigen::MatrixXd next(dom.nx, dom.ny);
    for (int i = 0; i < dom.nx; ++i)
        for (int j = 0; j < dom.ny; ++j) {
            double v = interp2(dom, theta_.vals, full.ax(i, j), full.ay(i, j), cfg_.interp_order);
            if (cfg_.system == SystemKind::Perturbed) {
                // source -v2 dtheta integrated along the characteristic (midpoint)
                const double hx = half.ax(i, j), hy = half.ay(i, j);
                const double v2h = interp2(dom, u2, hx, hy, cfg_.interp_order);
                v -= dt * v2h * profile_.dtheta(hy);
            }
            next(i, j) = v;
        }
    theta_.vals = next;
}

void Simulator::step() {
    const double dt = cfg_.dt;
    if (!init_captured_) {
        const double th2 = diagnostics().theta_l2;
        init_norm2_ = th2 * th2 + state_.f.squaredNorm();
        // range baseline from the interpolated field (nodes plus cell
        // centres), not the bare nodal samples: a peak that sits between
        // nodes would otherwise register as an overshoot once it drifts
        // onto a node
        const RectDomain& dom = op_.basis.dom;
        theta0_min_ = theta_.vals.minCoeff();
        theta0_max_ = theta_.vals.maxCoeff();
        for (int i = 0; i + 1 < dom.nx; ++i)
            for (int j = 0; j + 1 < dom.ny; ++j) {
                const double v = interp2(dom, theta_.vals, 0.5 * (dom.x[i] + dom.x[i + 1]),
                                         0.5 * (dom.y[j] + dom.y[j + 1]), cfg_.interp_order);
                theta0_min_ = std::min(theta0_min_, v);
                theta0_max_ = std::max(theta0_max_, v);
            }
        theta0_range_ = theta0_max_ - theta0_min_;
        init_captured_ = true;
    }

    // the advective stability bound only constrains steps that backtrack
    // characteristics; the linearized perturbed update is pointwise
    const bool transports =
        (cfg_.system == SystemKind::Full && theta_.vals.cwiseAbs().maxCoeff() != 0.0) ||
        (cfg_.system == SystemKind::Perturbed && cfg_.mode == ModeKind::Nonlinear);
    if (transports && cfl_number(state_.f, dt) > cfg_.cfl)
        throw std::runtime_error("Simulator: CFL violation (reduce dt)");

    // (a) modal update with frozen buoyancy
    const Eigen::VectorXd b = buoyancy(theta_.vals);
    const Eigen::VectorXd& f0 = state_.f;
    const Eigen::VectorXd k1 = modal_rhs(f0, b);
    const Eigen::VectorXd k2 = modal_rhs(f0 + 0.5 * dt * k1, b);
    const Eigen::VectorXd k3 = modal_rhs(f0 + 0.5 * dt * k2, b);
    const Eigen::VectorXd k4 = modal_rhs(f0 + dt * k3, b);
    Eigen::VectorXd f1 = f0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!f1.allFinite()) throw std::runtime_error("Simulator: non-finite modal state");

    // (b) transport with the midpoint velocity
    const Eigen::VectorXd fmid = 0.5 * (f0 + f1);
    theta_step(fmid, dt);

    state_.f = f1;
    state_.t += dt;
}

void Simulator::run(double T) {
    const long nsteps = static_cast<long>(std::llround(T / cfg_.dt));
    for (long s = 0; s < nsteps; ++s) step();
}

Diagnostics Simulator::diagnostics() const {
    const RectDomain& dom = op_.basis.dom;
    Diagnostics d;
    d.t = state_.t;
    d.kinetic = 0.5 * state_.f.squaredNorm();
    d.grad_u_sq = state_.f.dot(grad_gram_ * state_.f);
    d.slip = state_.f.dot(trace_gram_ * state_.f);
    double l2 = 0.0, l4 = 0.0, li = 0.0;
    for (int i = 0; i < dom.nx; ++i)
        for (int j = 0; j < dom.ny; ++j) {
            const double v = theta_.vals(i, j);
            const double w = dom.wx[i] * dom.wy[j];
            l2 += w * v * v;
            l4 += w * v * v * v * v;
            li = std::max(li, std::abs(v));
        }
    d.theta_l2 = std::sqrt(l2);
    d.theta_l4 = std::pow(l4, 0.25);
    d.theta_linf = li;
    d.v2_l2 = v2_l2(state_.f);
    d.cfl = cfl_number(state_.f, cfg_.dt);
    d.clamped = clamped_total_;

    if (init_captured_) {
        const double growth = (cfg_.system == SystemKind::Full)
                                  ? op_.params.g
                                  : op_.params.g + profile_.max_abs_dtheta();
        const double bound = init_norm2_ * std::exp(growth * state_.t) * (1.0 + 1e-6);
        const double now = d.theta_l2 * d.theta_l2 + state_.f.squaredNorm();
        d.energy_bound_ok = now <= bound;
        if (cfg_.system == SystemKind::Full || cfg_.mode == ModeKind::Nonlinear) {
            const double over = std::max(theta_.vals.maxCoeff() - theta0_max_,
                                         theta0_min_ - theta_.vals.minCoeff());
            if (cfg_.system == SystemKind::Full)
                d.theta_range_ok = over <= 1e-3 * (theta0_range_ > 0 ? theta0_range_ : 1.0);
        }
    }
    return d;
}

}  // namespace bouss
