#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kfp/constants.hpp"
#include "kfp/operators.hpp"

namespace kfp {

struct TimeGrid {
    double T = 1.0;
    int Nt = 100;

    void validate() const {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
        if (Nt < 1) throw std::invalid_argument("TimeGrid: Nt must be >= 1");
    }
    double dt() const { return T / Nt; }
    double node(int n) const { return T * n / Nt; }
    bool operator==(const TimeGrid&) const = default;
};

// Piecewise-constant scalar control: value u[n] on cell [t_n, t_{n+1}),
// with per-cell box bounds satisfying u_min <= 0 <= u_max.
struct ControlSignal {
    TimeGrid grid;
    std::vector<double> u;
    std::vector<double> u_min, u_max;

    static ControlSignal zero(const TimeGrid& g, double lo = -1.0, double hi = 1.0);
    static ControlSignal constant(const TimeGrid& g, double value,
                                  double lo = -1.0, double hi = 1.0);

    void validate() const;
    void clip(); // project onto the box
    double l2() const;   // sqrt(dt * sum u^2) = L2(0,T) norm
    double linf() const;
    double bound_linf() const; // max(|u_min|_inf, |u_max|_inf)
};

enum class Scheme { imex_euler, imex_trapezoid };

struct StepOptions {
    Scheme scheme = Scheme::imex_euler;
    RhsOptions rhs;               // which terms participate
    double blowup_factor = 1e6;   // abort threshold relative to data scale
    bool store_states = true;
};

// time-dependent source, evaluated per cell (t is the quadrature time inside
// cell n: the left node for Euler, the midpoint for the trapezoid stage)
using SourceFn = std::function<SpectralField(int n, double t)>;

struct Trajectory {
    DomainSpec dom;
    TimeGrid grid;
    std::vector<SpectralField> states;  // Nt+1 nodes when stored
    std::vector<double> norm_Y_hist;    // per node
    std::vector<double> norm_Vv_hist;   // per node
    bool blew_up = false;
    int blowup_step = -1;
    bool cfl_warning = false;
    double C_hat_est = 0.0; // only set by solve_linear

    // ||y||_{L2(0,T;Vv)} by left-endpoint rectangles
    double l2_Vv() const;
    double linf_Y() const;
    // sum of the two (the norm the fixed-point argument contracts in)
    double triple_norm() const;
};

// left-endpoint L2(0,T;Vv) + sup-Y norm of the difference of two trajectories
// on the same grid (states must be stored)
double triple_norm_diff(const Trajectory& a, const Trajectory& b);

// stability ratio dt (pi jm / L)^2 of the explicit transport step against the
// implicit velocity damping, rated at the dealias limit jm; keep it below 1,
// and near 0.5 or less when the march runs for thousands of steps
double cfl_number(const DomainSpec& dom, double dt);

// One IMEX-Euler step of dy/dt = A y [+ D y] + g: Ornstein-Uhlenbeck factor
// implicit (division by 1 + dt |k|), transport, moment drift and source
// explicit.
SpectralField linear_step(const SpectralField& y, double dt, const PotentialSpec& U,
                          const SpectralField& g, const StepOptions& opts = {});

// March the frozen-source linear equation. Records norm histories and the
// observed stability ratio triple_norm / (|y0|_Y + |g|_{L2(0,T;Vv')}).
Trajectory solve_linear(const SpectralField& y0, const TimeGrid& grid,
                        const PotentialSpec& U, const SourceFn& g,
                        const StepOptions& opts = {});

// Full nonlinear march with control.
Trajectory direct_march(const SpectralField& y0, const TimeGrid& grid,
                        const PotentialSpec& U, const ControlShape& alpha,
                        const ControlSignal& u, const StepOptions& opts = {});

// Smallness conditions of the fixed-point existence argument, evaluated with
// empirical constants (advisory, not a proof on the grid).
struct SmallnessCheck {
    bool evaluated = false;
    double c_hat = 0.0, n_norm = 0.0, u_l2 = 0.0, kappa = 0.0;
    double data_size = 0.0;   // |y0|_Y + |B| |u|_L2 + 0.5 |N|^2 |u|_L2^2
    double data_limit = 0.0;  // kappa / (2 c_hat)
    double contraction = 0.0; // c_hat |u|_L2 |N|, must stay below 3/4
    bool data_ok = false, contraction_ok = false, certified = false;
};

struct PicardReport {
    int iterations = 0;
    std::vector<double> residuals; // relative triple-norm increments
    bool converged = false;
    Trajectory trajectory;
    SmallnessCheck smallness;
};

// Fixed-point construction: repeatedly solve the linear equation with the
// nonlinear and control terms frozen at the previous iterate. The converged
// trajectory satisfies the same discrete recursion as direct_march.
PicardReport picard_solve(const SpectralField& y0, const TimeGrid& grid,
                          const PotentialSpec& U, const ControlShape& alpha,
                          const ControlSignal& u, const StepOptions& opts = {},
                          double tol = 1e-9, int max_iter = 50,
                          const ConstantsTable* constants = nullptr);

} // namespace kfp
