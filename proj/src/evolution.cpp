#include "kfp/evolution.hpp"

#include <cmath>
#include <numbers>

namespace kfp {

ControlSignal ControlSignal::zero(const TimeGrid& g, double lo, double hi) {
    ControlSignal s;
    s.grid = g;
    s.u.assign(g.Nt, 0.0);
    s.u_min.assign(g.Nt, lo);
    s.u_max.assign(g.Nt, hi);
    return s;
}

ControlSignal ControlSignal::constant(const TimeGrid& g, double value, double lo, double hi) {
    ControlSignal s = zero(g, lo, hi);
    for (auto& v : s.u) v = value;
    s.clip();
    return s;
}

void ControlSignal::validate() const {
    grid.validate();
    std::size_t n = static_cast<std::size_t>(grid.Nt);
    if (u.size() != n || u_min.size() != n || u_max.size() != n)
        throw std::invalid_argument("ControlSignal: cell count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u_min[i] <= 0.0 && 0.0 <= u_max[i]))
            throw std::invalid_argument("ControlSignal: box must contain 0");
        if (!(u_min[i] <= u[i] && u[i] <= u_max[i]))
            throw std::invalid_argument("ControlSignal: value outside its box");
    }
}

void ControlSignal::clip() {
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::min(std::max(u[i], u_min[i]), u_max[i]);
}

double ControlSignal::l2() const {
    double s = 0.0;
    for (double v : u) s += v * v;
    return std::sqrt(s * grid.dt());
}

double ControlSignal::linf() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

double ControlSignal::bound_linf() const {
    double m = 0.0;
    for (double v : u_min) m = std::max(m, std::abs(v));
    for (double v : u_max) m = std::max(m, std::abs(v));
    return m;
}

double Trajectory::l2_Vv() const {
    double s = 0.0;
    for (int n = 0; n < grid.Nt && n < static_cast<int>(norm_Vv_hist.size()); ++n)
        s += norm_Vv_hist[n] * norm_Vv_hist[n];
    return std::sqrt(s * grid.dt());
}

double Trajectory::linf_Y() const {
    double m = 0.0;
    for (double v : norm_Y_hist) m = std::max(m, v);
    return m;
}

double Trajectory::triple_norm() const { return l2_Vv() + linf_Y(); }

double triple_norm_diff(const Trajectory& a, const Trajectory& b) {
    if (!(a.grid == b.grid) || a.states.size() != b.states.size())
        throw std::invalid_argument("triple_norm_diff: trajectories not comparable");
    double dt = a.grid.dt();
    double l2 = 0.0, sup = 0.0;
    for (std::size_t n = 0; n < a.states.size(); ++n) {
        SpectralField diff = a.states[n];
        diff -= b.states[n];
        double ny = diff.norm_Y();
        sup = std::max(sup, ny);
        if (n + 1 < a.states.size()) { // left endpoints only
            double nv = diff.norm_Vv();
            l2 += nv * nv;
        }
    }
    return std::sqrt(l2 * dt) + sup;
}

double cfl_number(const DomainSpec& dom, double dt) {
    // Stability ratio for the explicit transport step against the implicit
    // velocity damping. The Hermite ladder contributes sqrt(k) to both the
    // transport eigenvalue and the damping, so the threshold only sees the
    // spatial frequency: empirically the march is stable for
    // dt (pi jmax / L)^2 up to about 1. We rate against the dealias band,
    // which is where products keep the cascade; data populated beyond it
    // needs a correspondingly smaller dt (see MarchRecorder::start).
    double jm = static_cast<double>(dom.dealias_limit());
    double w = std::numbers::pi * jm / dom.L;
    return dt * w * w;
}

namespace {

// divide slice k by (1 + dt |k|)
void ou_implicit(SpectralField& y, double dt) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        double f = 1.0 / (1.0 + dt * dom.kabs(kf));
        std::complex<double>* blk = y.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) blk[t] *= f;
    }
}

// multiply slice k by (1 - dt |k|): the explicit half of the trapezoid
void ou_explicit(SpectralField& y, double dt) {
    const DomainSpec& dom = y.dom;
    std::size_t ns = dom.n_spatial();
    for (std::size_t kf = 0; kf < dom.n_hermite(); ++kf) {
        double f = 1.0 - dt * dom.kabs(kf);
        std::complex<double>* blk = y.c.data() + kf * ns;
        for (std::size_t t = 0; t < ns; ++t) blk[t] *= f;
    }
}

// explicit terms of the linear flow: -transport [+ alignment drift]
SpectralField explicit_linear(const SpectralField& y, const PotentialSpec& U,
                              const RhsOptions& rhs) {
    SpectralField e = apply_transport(y);
    e *= -1.0;
    if (rhs.alignment) e += alignment_drift(y, U);
    return e;
}

struct MarchRecorder {
    Trajectory traj;
    double blow_ref = 0.0;
    double factor = 1e6;

    void start(const SpectralField& y0, const TimeGrid& grid, bool store) {
        traj.dom = y0.dom;
        traj.grid = grid;
        // products are masked to the dealias band, but linear terms are
        // diagonal in j, so initial data populated beyond the band keeps its
        // high modes for the whole march; rate the stability against the
        // widest mode actually present
        const DomainSpec& dom = y0.dom;
        int jsup = dom.dealias_limit();
        std::size_t ns = dom.n_spatial();
        for (std::size_t tf = 0; tf < ns; ++tf) {
            bool used = false;
            for (std::size_t kf = 0; kf < dom.n_hermite() && !used; ++kf)
                used = y0.at(kf, tf) != std::complex<double>(0.0, 0.0);
            if (!used) continue;
            auto tp = dom.tpair(tf);
            for (int i = 0; i < dom.d; ++i)
                jsup = std::max(jsup, std::abs(dom.mode_of_bin(tp[i])));
        }
        double w = std::numbers::pi * jsup / dom.L;
        traj.cfl_warning = grid.dt() * w * w > 1.0;
        traj.norm_Y_hist.reserve(grid.Nt + 1);
        traj.norm_Vv_hist.reserve(grid.Nt + 1);
        if (store) traj.states.reserve(grid.Nt + 1);
        record(y0, store);
        blow_ref = traj.norm_Y_hist[0];
    }

    // returns false when the blow-up guard trips
    bool record(const SpectralField& y, bool store) {
        double ny = y.norm_Y();
        traj.norm_Y_hist.push_back(ny);
        traj.norm_Vv_hist.push_back(y.norm_Vv());
        if (store) traj.states.push_back(y);
        std::size_t n = traj.norm_Y_hist.size();
        if (n == 2) blow_ref = std::max(blow_ref, ny); // pure-source runs
        if (n >= 2 && ny > factor * blow_ref && ny > 0.0) {
            traj.blew_up = true;
            traj.blowup_step = static_cast<int>(n) - 1;
            return false;
        }
        return true;
    }
};

} // namespace

SpectralField linear_step(const SpectralField& y, double dt, const PotentialSpec& U,
                          const SpectralField& g, const StepOptions& opts) {
    SpectralField e = explicit_linear(y, U, opts.rhs);
    e += g;
    SpectralField out = y;
    out.axpy(dt, e);
    ou_implicit(out, dt);
    return out;
}

Trajectory solve_linear(const SpectralField& y0, const TimeGrid& grid,
                        const PotentialSpec& U, const SourceFn& g,
                        const StepOptions& opts) {
    grid.validate();
    double dt = grid.dt();
    MarchRecorder rec;
    rec.factor = opts.blowup_factor;
    rec.start(y0, grid, opts.store_states);

    double src_l2 = 0.0; // left-endpoint L2(0,T;Vv') of the source
    SpectralField y = y0;
    for (int n = 0; n < grid.Nt; ++n) {
        double tn = grid.node(n);
        if (opts.scheme == Scheme::imex_euler) {
            SpectralField gn = g ? g(n, tn) : SpectralField(y.dom);
            double gd = gn.dual_norm_Vv();
            src_l2 += gd * gd;
            SpectralField e = explicit_linear(y, U, opts.rhs);
            e += gn;
            y.axpy(dt, e);
            ou_implicit(y, dt);
        } else {
            SpectralField gn = g ? g(n, tn) : SpectralField(y.dom);
            double gd = gn.dual_norm_Vv();
            src_l2 += gd * gd;
            // half step, implicit OU
            SpectralField half = explicit_linear(y, U, opts.rhs);
            half += gn;
            half *= 0.5 * dt;
            half += y;
            ou_implicit(half, 0.5 * dt);
            // full step: Crank-Nicolson OU + midpoint explicit part
            SpectralField gm = g ? g(n, tn + 0.5 * dt) : SpectralField(y.dom);
            SpectralField e = explicit_linear(half, U, opts.rhs);
            e += gm;
            ou_explicit(y, 0.5 * dt);
            y.axpy(dt, e);
            ou_implicit(y, 0.5 * dt);
        }
        if (!rec.record(y, opts.store_states)) break;
    }

    double denom = y0.norm_Y() + std::sqrt(src_l2 * dt);
    rec.traj.C_hat_est = denom > 0.0 ? rec.traj.triple_norm() / denom : 0.0;
    return rec.traj;
}

Trajectory direct_march(const SpectralField& y0, const TimeGrid& grid,
                        const PotentialSpec& U, const ControlShape& alpha,
                        const ControlSignal& u, const StepOptions& opts) {
    grid.validate();
    u.validate();
    if (!(u.grid == grid))
        throw std::invalid_argument("direct_march: control grid mismatch");
    double dt = grid.dt();
    MarchRecorder rec;
    rec.factor = opts.blowup_factor;
    rec.start(y0, grid, opts.store_states);

    SpectralField y = y0;
    for (int n = 0; n < grid.Nt; ++n) {
        if (opts.scheme == Scheme::imex_euler) {
            SpectralField e = explicit_linear(y, U, opts.rhs);
            if (opts.rhs.nonlinear) {
                e -= nl_density(y, U);
                e -= nl_momentum(y, U);
            }
            if (opts.rhs.control && u.u[n] != 0.0) {
                SpectralField cu = apply_control_coupling(y, alpha);
                cu += control_source(alpha);
                e.axpy(u.u[n], cu);
            }
            y.axpy(dt, e);
            ou_implicit(y, dt);
        } else {
            auto expl = [&](const SpectralField& z) {
                SpectralField e = explicit_linear(z, U, opts.rhs);
                if (opts.rhs.nonlinear) {
                    e -= nl_density(z, U);
                    e -= nl_momentum(z, U);
                }
                if (opts.rhs.control && u.u[n] != 0.0) {
                    SpectralField cu = apply_control_coupling(z, alpha);
                    cu += control_source(alpha);
                    e.axpy(u.u[n], cu);
                }
                return e;
            };
            SpectralField half = expl(y);
            half *= 0.5 * dt;
            half += y;
            ou_implicit(half, 0.5 * dt);
            SpectralField e = expl(half);
            ou_explicit(y, 0.5 * dt);
            y.axpy(dt, e);
            ou_implicit(y, 0.5 * dt);
        }
        if (!rec.record(y, opts.store_states)) break;
    }
    return rec.traj;
}

PicardReport picard_solve(const SpectralField& y0, const TimeGrid& grid,
                          const PotentialSpec& U, const ControlShape& alpha,
                          const ControlSignal& u, const StepOptions& opts,
                          double tol, int max_iter, const ConstantsTable* constants) {
    grid.validate();
    u.validate();
    if (!(u.grid == grid))
        throw std::invalid_argument("picard_solve: control grid mismatch");

    PicardReport rep;
    StepOptions lin = opts;
    lin.store_states = true;
    lin.scheme = Scheme::imex_euler; // the fixed point matches direct_march

    SpectralField B = control_source(alpha);

    // iterate z -> trajectory of the linear equation with sources frozen at z
    Trajectory z;
    z.dom = y0.dom;
    z.grid = grid;
    z.states.assign(grid.Nt + 1, SpectralField(y0.dom));
    z.norm_Y_hist.assign(grid.Nt + 1, 0.0);
    z.norm_Vv_hist.assign(grid.Nt + 1, 0.0);

    for (int it = 1; it <= max_iter; ++it) {
        SourceFn src = [&](int n, double) {
            const SpectralField& zn = z.states[n];
            SpectralField g(zn.dom);
            if (opts.rhs.nonlinear) {
                g -= nl_density(zn, U);
                g -= nl_momentum(zn, U);
            }
            if (opts.rhs.control && u.u[n] != 0.0) {
                SpectralField cu = apply_control_coupling(zn, alpha);
                cu += B;
                g.axpy(u.u[n], cu);
            }
            return g;
        };
        Trajectory y = solve_linear(y0, grid, U, src, lin);
        rep.iterations = it;
        if (y.blew_up) {
            rep.trajectory = std::move(y);
            rep.converged = false;
            break;
        }
        double incr = triple_norm_diff(y, z);
        double scale = std::max(y.triple_norm(), 1e-300);
        rep.residuals.push_back(incr / scale);
        z = std::move(y);
        if (rep.residuals.back() <= tol) {
            rep.converged = true;
            break;
        }
    }
    if (rep.trajectory.states.empty()) rep.trajectory = std::move(z);

    if (constants) {
        SmallnessCheck& sc = rep.smallness;
        sc.evaluated = true;
        sc.c_hat = constants->c_hat;
        sc.n_norm = constants->n_norm;
        sc.u_l2 = constants->u_l2;
        sc.kappa = constants->kappa_min;
        double ul2 = u.l2();
        sc.data_size = y0.norm_Y() + B.norm_Y() * ul2 + 0.5 * sc.n_norm * sc.n_norm * ul2 * ul2;
        sc.data_limit = sc.c_hat > 0.0 ? sc.kappa / (2.0 * sc.c_hat) : 0.0;
        sc.contraction = sc.c_hat * ul2 * sc.n_norm;
        sc.data_ok = sc.data_size <= sc.data_limit;
        sc.contraction_ok = sc.contraction < 0.75;
        sc.certified = sc.data_ok && sc.contraction_ok;
    }
    return rep;
}

} // namespace kfp
