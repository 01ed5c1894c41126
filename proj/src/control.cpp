#include "kfp/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfp {

void TrackingProblem::validate() const {
    dom.validate();
    grid.validate();
    if (y_d.size() != static_cast<std::size_t>(grid.Nt) + 1)
        throw std::invalid_argument("TrackingProblem: y_d must hold Nt+1 nodes");
    if (!(beta >= 0.0))
        throw std::invalid_argument("TrackingProblem: beta must be nonnegative");
}

namespace {

// Re sum a conj(b), no volume factor (the reverse sweep carries it inside
// the cost gradient fields)
double inner_raw(const SpectralField& a, const SpectralField& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        acc += a.c[i].real() * b.c[i].real() + a.c[i].imag() * b.c[i].imag();
    return acc;
}

void scale_Vv_weights(SpectralField& y) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        double w = 1.0 + dom.kabs(kf);
        std::complex<double>* blk = y.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) blk[t] *= w;
    }
}

void ou_resolvent(SpectralField& y, double dt) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        double f = 1.0 / (1.0 + dt * dom.kabs(kf));
        std::complex<double>* blk = y.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) blk[t] *= f;
    }
}

double clip_one(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

} // namespace

CostBreakdown evaluate_cost(const TrackingProblem& p, const ControlSignal& u,
                            Trajectory* forward) {
    p.validate();
    StepOptions so = p.step;
    so.store_states = true;
    Trajectory traj = direct_march(p.y0, p.grid, p.U, p.alpha, u, so);

    CostBreakdown cb;
    if (traj.blew_up) {
        cb.blown_up = true;
        cb.total = std::numeric_limits<double>::infinity();
        cb.tracking = cb.total;
        if (forward) *forward = std::move(traj);
        return cb;
    }

    double dt = p.grid.dt();
    for (int n = 0; n < p.grid.Nt; ++n) {
        SpectralField diff = traj.states[n];
        diff -= p.y_d[n];
        double nv = diff.norm_Vv();
        cb.tracking += nv * nv;
    }
    cb.tracking *= 0.5 * dt;
    for (double v : u.u) cb.penalty += v * v;
    cb.penalty *= 0.5 * p.beta * dt;
    cb.total = cb.tracking + cb.penalty;
    if (forward) *forward = std::move(traj);
    return cb;
}

std::vector<double> cost_gradient(const TrackingProblem& p, const ControlSignal& u,
                                  const Trajectory& forward) {
    p.validate();
    if (p.step.scheme != Scheme::imex_euler)
        throw std::logic_error("cost_gradient: adjoint implemented for the Euler scheme");
    if (forward.states.size() != static_cast<std::size_t>(p.grid.Nt) + 1)
        throw std::logic_error("cost_gradient: forward states were not stored");
    if (forward.blew_up)
        throw std::runtime_error("cost_gradient: forward trajectory blew up");

    const int Nt = p.grid.Nt;
    const double dt = p.grid.dt();
    const double vol = p.dom.volume();
    const RhsOptions& rhs = p.step.rhs;
    SpectralField B = control_source(p.alpha);

    std::vector<double> grad(Nt, 0.0);
    SpectralField lam(p.dom); // dJ/dy_{n+1}, starts at zero for n+1 = Nt

    for (int n = Nt - 1; n >= 0; --n) {
        SpectralField xi = lam;
        ou_resolvent(xi, dt); // transpose of the implicit factor

        const SpectralField& yn = forward.states[n];

        grad[n] = p.beta * dt * u.u[n];
        if (rhs.control) {
            SpectralField cu = apply_control_coupling(yn, p.alpha);
            cu += B;
            grad[n] += dt * inner_raw(xi, cu);
        }

        // lam_n = g_n + (I + dt Df^H) xi
        SpectralField nl = forward.states[n];
        nl -= p.y_d[n];
        scale_Vv_weights(nl);
        nl *= dt * vol; // gradient of the tracking term at node n

        nl += xi;
        SpectralField t = apply_transport(xi); // (-transport)^T = +transport
        nl.axpy(dt, t);
        if (rhs.alignment) {
            SpectralField dterm = alignment_drift(xi, p.U);
            nl.axpy(dt, dterm);
        }
        if (rhs.nonlinear) {
            SpectralField h = nl_density_diff_adjoint(yn, p.U, xi);
            h += nl_momentum_diff_adjoint(yn, p.U, xi);
            nl.axpy(-dt, h);
        }
        if (rhs.control && u.u[n] != 0.0) {
            SpectralField nc = control_coupling_adjoint(xi, p.alpha);
            nl.axpy(dt * u.u[n], nc);
        }
        lam = std::move(nl);
    }
    return grad;
}

OptimizeResult projected_gradient(const TrackingProblem& p, const ControlSignal& u0,
                                  const OptimizeOptions& opts) {
    p.validate();
    u0.validate();

    OptimizeResult res;
    res.u = u0;
    res.u.clip();

    double dt = p.grid.dt();
    Trajectory traj;
    CostBreakdown cb = evaluate_cost(p, res.u, &traj);
    if (cb.blown_up) {
        res.cost = cb;
        res.stalled = true;
        return res;
    }
    std::vector<double> grad = cost_gradient(p, res.u, traj);

    auto stationarity = [&](const ControlSignal& u, const std::vector<double>& g) {
        double s = 0.0;
        for (int n = 0; n < p.grid.Nt; ++n) {
            double proj = clip_one(u.u[n] - g[n], u.u_min[n], u.u_max[n]);
            double d = u.u[n] - proj;
            s += d * d;
        }
        return std::sqrt(s * dt);
    };

    double step = opts.step0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        double stat = stationarity(res.u, grad);
        res.log.push_back({iter, cb.total, cb.tracking, cb.penalty, step, stat});
        if (stat <= opts.tol_factor * (1.0 + std::abs(cb.total))) {
            res.converged = true;
            break;
        }

        // Armijo backtracking on the projected step
        bool accepted = false;
        ControlSignal trial = res.u;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            double move2 = 0.0;
            for (int n = 0; n < p.grid.Nt; ++n) {
                trial.u[n] = clip_one(res.u.u[n] - step * grad[n],
                                      res.u.u_min[n], res.u.u_max[n]);
                double d = res.u.u[n] - trial.u[n];
                move2 += d * d;
            }
            if (move2 == 0.0) break; // projection pinned every cell
            Trajectory traj_trial;
            CostBreakdown cb_trial = evaluate_cost(p, trial, &traj_trial);
            if (!cb_trial.blown_up &&
                cb_trial.total <= cb.total - opts.armijo_c * move2 / step) {
                res.u = trial;
                cb = cb_trial;
                traj = std::move(traj_trial);
                grad = cost_gradient(p, res.u, traj);
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }
        res.iterations = iter + 1;
    }

    res.cost = cb;
    res.trajectory = std::move(traj);
    return res;
}

UniquenessCertificate uniqueness_certificate(const TrackingProblem& p,
                                             const ControlSignal& bounds,
                                             const ConstantsTable& table) {
    p.validate();
    UniquenessCertificate c;
    double sqd = std::sqrt(static_cast<double>(p.dom.d));
    double C = table.c_hat, Un = table.u_l2, Nn = table.n_norm;

    c.y0_norm = p.y0.norm_Y();
    c.mu_small = table.mu_small;
    c.c1 = c.y0_norm <= c.mu_small;

    c.u_inf = bounds.bound_linf();
    c.c2 = c.u_inf <= 1.0;

    double dt = p.grid.dt();
    double acc = 0.0;
    for (int n = 0; n < p.grid.Nt; ++n) {
        double nv = p.y_d[n].norm_Vv();
        acc += nv * nv;
    }
    c.yd_l2vv = std::sqrt(acc * dt);
    c.kappa = table.kappa_min;

    double k2_needed = c.kappa + 2.0 * c.yd_l2vv;
    c.growth_args_cover = table.growth_k0 >= c.y0_norm && table.growth_k1 >= c.u_inf &&
                          table.growth_k2 >= k2_needed;
    c.growth_used = table.growth_value;

    c.cond3_lhs = 8.0 * p.dom.d * C * C * Un * Un * (1.0 + Nn) *
                  (2.0 * c.yd_l2vv + c.kappa) * c.growth_used;
    c.c3 = c.cond3_lhs <= 0.5;

    c.cond4_lhs = 4.0 * sqd * C * C * Un * (1.0 + Nn) *
                  (c.y0_norm + (2.0 * c.yd_l2vv + c.kappa) * c.u_inf * Nn);
    c.c4 = c.cond4_lhs < 0.5;

    c.certified = c.c1 && c.c2 && c.c3 && c.c4;
    return c;
}

} // namespace kfp
