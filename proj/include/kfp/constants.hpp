#pragma once

#include <cstdint>
#include <string>

namespace kfp {

// Empirically estimated constants for the truncated discretization, produced
// by estimate_constants() and consumed by the smallness / uniqueness checks.
// Nothing here is exact: c_hat and n_norm come from randomized probes and the
// growth surrogate is a max over sampled runs. The note records provenance.
struct ConstantsTable {
    int version = 1;
    double c_hat = 0.0;    // linear-solve stability ratio, max over probes
    double n_norm = 0.0;   // operator norm of the control coupling, Y -> dual
    double u_l2 = 0.0;     // L2 norm of the interaction potential on the torus
    double kappa_radius = 0.0;  // 1 / (8 sqrt(d) u_l2 c_hat)
    double mu_small = 0.0;      // 3 / (32 sqrt(d) u_l2 c_hat^2)
    double kappa_min = 0.0;     // min(1/(c_hat (4 sqrt(d) u_l2 + 1)), 1/(16 sqrt(d) u_l2 c_hat))
    // growth surrogate: max observed sup-norm over runs with
    // |y0| <= k0, |u|_inf <= k1, penalty-ish budget k2
    double growth_k0 = 0.0, growth_k1 = 0.0, growth_k2 = 0.0;
    double growth_value = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::string note;
};

} // namespace kfp
