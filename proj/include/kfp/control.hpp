#pragma once

#include "kfp/evolution.hpp"

namespace kfp {

// Tracking problem
//   J(u) = 1/2 int_0^T |y(u) - y_d|_Vv^2 dt + beta/2 int_0^T u^2 dt
// over box-constrained piecewise-constant u, with y(u) the direct_march
// trajectory. Both integrals use left-endpoint rectangles, so the state at
// t = T does not enter the cost. Gradients are exact discrete adjoints of
// the IMEX-Euler recursion.
struct TrackingProblem {
    DomainSpec dom;
    TimeGrid grid;
    PotentialSpec U;
    ControlShape alpha;
    SpectralField y0;
    std::vector<SpectralField> y_d; // Nt+1 node values
    double beta = 1e-3;
    StepOptions step;

    void validate() const;
};

struct CostBreakdown {
    double tracking = 0.0;
    double penalty = 0.0;
    double total = 0.0;
    bool blown_up = false;
};

// Runs the forward march (stored states). On blow-up the cost is +inf.
CostBreakdown evaluate_cost(const TrackingProblem& p, const ControlSignal& u,
                            Trajectory* forward = nullptr);

// Exact gradient of the discrete cost via one reverse sweep through the
// stored forward states. Requires the Euler scheme and stored states.
std::vector<double> cost_gradient(const TrackingProblem& p, const ControlSignal& u,
                                  const Trajectory& forward);

struct OptimizeOptions {
    int max_iters = 200;
    double tol_factor = 1e-6; // stop at ||u - clip(u - grad)|| <= tol_factor (1 + |J|)
    int max_backtracks = 40;
    double armijo_c = 1e-4;
    double step0 = 1.0;
};

struct OptimizeIterate {
    int iter = 0;
    double cost = 0.0, tracking = 0.0, penalty = 0.0;
    double step = 0.0, stationarity = 0.0;
};

struct OptimizeResult {
    ControlSignal u;
    CostBreakdown cost;
    Trajectory trajectory;
    std::vector<OptimizeIterate> log;
    bool converged = false;
    bool stalled = false; // Armijo backtracking exhausted
    int iterations = 0;
};

// Projected gradient with Armijo backtracking on the box.
OptimizeResult projected_gradient(const TrackingProblem& p, const ControlSignal& u0,
                                  const OptimizeOptions& opts = {});

// Sufficient smallness conditions for uniqueness of the minimizer, evaluated
// with the empirical constants table. Advisory: the growth surrogate must
// have been sampled at arguments covering this instance.
struct UniquenessCertificate {
    double y0_norm = 0.0, mu_small = 0.0;
    double u_inf = 0.0;
    double yd_l2vv = 0.0, kappa = 0.0;
    double growth_used = 0.0;
    bool growth_args_cover = false;
    double cond3_lhs = 0.0, cond4_lhs = 0.0;
    bool c1 = false, c2 = false, c3 = false, c4 = false, certified = false;
};

UniquenessCertificate uniqueness_certificate(const TrackingProblem& p,
                                             const ControlSignal& bounds,
                                             const ConstantsTable& table);

} // namespace kfp
